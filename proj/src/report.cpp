#include "lcm/report.hpp"

#include <cstddef>

#include "lcm/version.hpp"

namespace lcm {

OrderedJson tool_info() {
  return OrderedJson{{"name", kToolName}, {"version", kToolVersion}};
}

OrderedJson model_json(const Model& m) { return OrderedJson::parse(serialize_model(m)); }

OrderedJson point_json(const ParamPoint& p) {
  OrderedJson out = OrderedJson::object();
  for (const auto& [s, v] : p) out[s.name()] = to_string(v);
  return out;
}

OrderedJson validation_json(const ValidationReport& v) {
  return OrderedJson{{"strongly_connected", v.strongly_connected},
                     {"inputs", v.num_inputs},
                     {"outputs", v.num_outputs},
                     {"leaks", v.num_leaks},
                     {"forest_formula_applicable", v.forest_formula_applicable}};
}

OrderedJson coefficient_map_json(const CoefficientMap& cm) {
  OrderedJson out;
  out["n"] = cm.n;
  OrderedJson symbols = OrderedJson::array();
  for (Sym s : cm.symbols) symbols.push_back(s.name());
  out["symbols"] = std::move(symbols);
  OrderedJson entries = OrderedJson::array();
  for (const auto& e : cm.entries)
    entries.push_back(OrderedJson{{"name", e.name}, {"polynomial", e.poly.to_string()}});
  out["coefficients"] = std::move(entries);
  OrderedJson dropped = OrderedJson::array();
  for (const auto& [name, value] : cm.dropped)
    dropped.push_back(OrderedJson{{"name", name}, {"value", to_string(value)}});
  out["dropped_constant"] = std::move(dropped);
  return out;
}

OrderedJson cross_validation_json(const CrossValidation& cv) {
  OrderedJson out;
  out["trials"] = cv.trials;
  out["seed"] = cv.seed;
  out["pass"] = cv.pass;
  if (cv.first_failure) {
    out["first_failure"] = OrderedJson{{"point", point_json(cv.first_failure->point)},
                                       {"coefficient", cv.first_failure->coefficient},
                                       {"forest_value", to_string(cv.first_failure->forest_value)},
                                       {"det_value", to_string(cv.first_failure->det_value)}};
  } else {
    out["first_failure"] = nullptr;
  }
  return out;
}

OrderedJson evidence_json(const Evidence& e) {
  return OrderedJson{{"kind", e.kind}, {"detail", e.detail}};
}

OrderedJson verdict_json(const Verdict& v) {
  OrderedJson evidence = OrderedJson::array();
  for (const Evidence& e : v.evidence) evidence.push_back(evidence_json(e));
  return OrderedJson{
      {"parameter", v.parameter}, {"class", to_string(v.cls)}, {"evidence", std::move(evidence)}};
}

OrderedJson verdicts_json(const std::vector<Verdict>& vs) {
  OrderedJson out = OrderedJson::array();
  for (const Verdict& v : vs) out.push_back(verdict_json(v));
  return out;
}

OrderedJson model_ident_json(const ModelIdentifiability& mi) {
  return OrderedJson{{"identifiable", mi.identifiable},
                     {"generic_rank", mi.generic_rank},
                     {"dimension", mi.dimension}};
}

OrderedJson fiber_json(const FiberReport& fr) {
  OrderedJson out;
  OrderedJson symbols = OrderedJson::array();
  for (Sym s : fr.symbols) symbols.push_back(s.name());
  out["symbols"] = std::move(symbols);
  out["base"] = fr.base;
  out["target"] = fr.target;
  out["seed"] = fr.seed;
  out["starts"] = fr.starts;
  out["converged"] = fr.converged;
  OrderedJson sols = OrderedJson::array();
  for (const FiberSolution& s : fr.solutions)
    sols.push_back(OrderedJson{{"x", s.x},
                               {"residual", s.residual},
                               {"start_index", s.start_index},
                               {"cluster_size", s.cluster_size}});
  out["solutions"] = std::move(sols);
  OrderedJson distinct = OrderedJson::object();
  for (const auto& [s, count] : fr.distinct_count) distinct[s.name()] = count;
  out["distinct_values"] = std::move(distinct);
  out["min_residual"] = fr.min_residual;
  out["max_residual"] = fr.max_residual;
  out["sign_crossing"] = fr.sign_crossing;
  return out;
}

namespace {

OrderedJson family_json(const FamilyId& f) {
  return OrderedJson{{"label", f.label()}, {"n", f.n}, {"in", f.in}, {"out", f.out}};
}

}  // namespace

OrderedJson recovery_json(const Recovery& r) {
  OrderedJson out;
  out["family"] = family_json(r.family);
  OrderedJson values = OrderedJson::object();
  for (const auto& [name, v] : r.values) values[name] = v;
  out["values"] = std::move(values);
  out["k12_candidates"] = r.k12_candidates;
  out["incoming_multiset"] = r.incoming_multiset;
  if (r.k12_k31_product)
    out["k12_k31_product"] = *r.k12_k31_product;
  else
    out["k12_k31_product"] = nullptr;
  out["notes"] = r.notes;
  return out;
}

OrderedJson exact_recovery_json(const ExactRecovery& r) {
  OrderedJson out;
  out["family"] = family_json(r.family);
  OrderedJson values = OrderedJson::object();
  for (const auto& [name, v] : r.values) values[name] = to_string(v);
  out["values"] = std::move(values);
  if (r.k12_k31_product)
    out["k12_k31_product"] = to_string(*r.k12_k31_product);
  else
    out["k12_k31_product"] = nullptr;
  out["notes"] = r.notes;
  return out;
}

OrderedJson table_json(const ClassificationTable& t) {
  OrderedJson out;
  out["tool"] = tool_info();
  out["kind"] = "classification-table";
  out["config"] = OrderedJson{{"n_max", t.n_max},
                              {"seed", t.seed},
                              {"points", t.points},
                              {"starts", t.starts},
                              {"fiber_base_points", t.fiber_base_points}};
  OrderedJson cells = OrderedJson::array();
  for (const TableCell& cell : t.cells) {
    OrderedJson c;
    c["family"] = family_json(cell.family);
    c["model"] = model_ident_json(cell.model_ident);
    c["verdicts"] = verdicts_json(cell.verdicts);
    cells.push_back(std::move(c));
  }
  out["cells"] = std::move(cells);
  return out;
}

std::string table_markdown(const ClassificationTable& t) {
  std::string md;
  md += "# Star family classification\n\n";
  md += "Generated by ";
  md += kToolName;
  md += " ";
  md += kToolVersion;
  md += "; seed " + std::to_string(t.seed) + ", rank points " + std::to_string(t.points) +
        ", fiber starts " + std::to_string(t.starts) + " at " +
        std::to_string(t.fiber_base_points) + " base points, n up to " +
        std::to_string(t.n_max) + ".\n\n";
  md += "| family | n | parameter | class | evidence |\n";
  md += "|--------|---|-----------|-------|----------|\n";
  for (const TableCell& cell : t.cells) {
    for (const Verdict& v : cell.verdicts) {
      std::string ev;
      for (std::size_t i = 0; i < v.evidence.size(); ++i) {
        if (i) ev += "; ";
        ev += v.evidence[i].kind + ": " + v.evidence[i].detail;
      }
      md += "| " + cell.family.label() + " | " + std::to_string(cell.family.n) + " | " +
            v.parameter + " | " + to_string(v.cls) + " | " + ev + " |\n";
    }
  }
  return md;
}

std::string render(const OrderedJson& doc) { return doc.dump(2) + "\n"; }

}  // namespace lcm
