#include "polybound/mps.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "polybound/parse.hpp"

namespace polybound {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kMpsNameWidth = 8;

bool mps_name_ok(const std::string& name) {
  if (name.empty() || name.size() > kMpsNameWidth) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '.';
  });
}

/// Append `text` at 1-based column `col` (padding with spaces).
void put_field(std::string& line, std::size_t col, const std::string& text) {
  if (line.size() < col - 1) line.resize(col - 1, ' ');
  line += text;
}

std::string field_line(std::initializer_list<std::pair<std::size_t, std::string>> fields) {
  std::string line;
  for (const auto& [col, text] : fields) put_field(line, col, text);
  return line;
}

ordered_json expr_json(const LinearExpr& e) {
  ordered_json j;
  j["constant"] = e.constant;
  ordered_json terms;
  for (const auto& [id, c] : e.terms) terms[std::to_string(id)] = c;
  j["terms"] = std::move(terms);
  return j;
}

LinearExpr expr_from_json(const ordered_json& j) {
  LinearExpr e;
  e.constant = j.at("constant").get<double>();
  for (const auto& [key, value] : j.at("terms").items()) {
    e.terms[std::stoi(key)] = value.get<double>();
  }
  return e;
}

std::string export_mps(const MilpModel& model, ExportResult& out) {
  // variable names: keep short clean names, deterministically rename the rest
  std::vector<std::string> names(model.vars.size());
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    const std::string& orig = model.vars[j].name;
    if (mps_name_ok(orig)) {
      names[j] = orig;
    } else {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "V%07zu", j + 1);
      names[j] = buf;
      out.renamed.emplace_back(orig, names[j]);
    }
  }

  std::ostringstream os;
  os << field_line({{1, "NAME"}, {15, model.name.empty() ? "POLYBND" : model.name}})
     << "\n";
  os << "ROWS\n";
  os << field_line({{2, "N"}, {5, "OBJ"}}) << "\n";
  std::vector<std::string> row_names(model.rows.size());
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    row_names[i] = "R" + std::to_string(i + 1);
    os << field_line({{2, "L"}, {5, row_names[i]}}) << "\n";
  }

  os << "COLUMNS\n";
  bool in_integer_block = false;
  const std::string marker_on =
      field_line({{5, "MARK0001"}, {15, "'MARKER'"}, {40, "'INTORG'"}});
  const std::string marker_off =
      field_line({{5, "MARK0002"}, {15, "'MARKER'"}, {40, "'INTEND'"}});
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    const bool binary = model.vars[j].binary;
    if (binary != in_integer_block) {
      os << (binary ? marker_on : marker_off) << "\n";
      in_integer_block = binary;
    }
    auto obj_it = model.objective.terms.find(model.vars[j].id);
    if (obj_it != model.objective.terms.end()) {
      os << field_line({{5, names[j]}, {15, "OBJ"}, {25, format_double(obj_it->second)}})
         << "\n";
    }
    for (std::size_t i = 0; i < model.rows.size(); ++i) {
      auto it = model.rows[i].expr.terms.find(model.vars[j].id);
      if (it == model.rows[i].expr.terms.end()) continue;
      os << field_line({{5, names[j]}, {15, row_names[i]}, {25, format_double(it->second)}})
         << "\n";
    }
  }
  if (in_integer_block) os << marker_off << "\n";

  os << "RHS\n";
  if (model.objective.constant != 0.0) {
    // constant objective offset, MPS convention: negated RHS on the N row
    os << field_line(
              {{5, "RHS"}, {15, "OBJ"}, {25, format_double(-model.objective.constant)}})
       << "\n";
  }
  for (std::size_t i = 0; i < model.rows.size(); ++i) {
    if (model.rows[i].rhs == 0.0) continue;
    os << field_line({{5, "RHS"}, {15, row_names[i]}, {25, format_double(model.rows[i].rhs)}})
       << "\n";
  }

  os << "BOUNDS\n";
  for (std::size_t j = 0; j < model.vars.size(); ++j) {
    const auto& v = model.vars[j];
    if (v.lower != 0.0) {
      os << field_line({{2, "LO"}, {5, "BND"}, {15, names[j]}, {25, format_double(v.lower)}})
         << "\n";
    }
    os << field_line({{2, "UP"}, {5, "BND"}, {15, names[j]}, {25, format_double(v.upper)}})
       << "\n";
  }
  os << "ENDATA\n";
  return os.str();
}

std::string export_json(const MilpModel& model) {
  ordered_json j;
  j["format"] = "polybound-milp-v1";
  j["name"] = model.name;
  ordered_json vars = ordered_json::array();
  for (const auto& v : model.vars) {
    ordered_json jv;
    jv["id"] = v.id;
    jv["kind"] = v.kind == LiftedKind::Unit ? "u" : (v.kind == LiftedKind::Remainder ? "r" : "y");
    jv["name"] = v.name;
    jv["lower"] = v.lower;
    jv["upper"] = v.upper;
    jv["binary"] = v.binary;
    jv["var_index"] = v.var_index;
    jv["bit"] = v.bit;
    vars.push_back(std::move(jv));
  }
  j["vars"] = std::move(vars);
  j["objective"] = expr_json(model.objective);
  ordered_json rows = ordered_json::array();
  for (const auto& row : model.rows) {
    ordered_json jr = expr_json(row.expr);
    jr["rhs"] = row.rhs;
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  j["phi_w_row_begin"] = model.phi_w_row_begin;
  ordered_json exps = ordered_json::array();
  for (const auto& ex : model.expansions) {
    ordered_json je;
    je["var_index"] = ex.var_index;
    je["alpha"] = ex.alpha;
    je["beta"] = ex.beta;
    je["kappa"] = ex.kappa;
    je["sigma"] = ex.sigma;
    je["discrete"] = ex.discrete;
    je["unit_ids"] = ex.unit_ids;
    if (ex.remainder_id) je["remainder_id"] = *ex.remainder_id;
    je["needs_upper_bound_constraint"] = ex.needs_upper_bound_constraint;
    exps.push_back(std::move(je));
  }
  j["expansions"] = std::move(exps);
  ordered_json prods = ordered_json::array();
  for (const auto& up : model.products) {
    ordered_json jp;
    jp["id"] = up.id;
    jp["unit_vars"] = std::vector<LiftedId>(up.unit_vars.begin(), up.unit_vars.end());
    if (up.remainder) jp["remainder"] = *up.remainder;
    prods.push_back(std::move(jp));
  }
  j["products"] = std::move(prods);
  ordered_json stats;
  stats["phi"] = model.stats.phi;
  stats["psi"] = model.stats.psi;
  stats["psi_pre_dedup"] = model.stats.psi_pre_dedup;
  stats["rho"] = model.stats.rho;
  stats["rho_pre_dedup"] = model.stats.rho_pre_dedup;
  stats["t"] = model.stats.t;
  stats["d"] = model.stats.d;
  stats["sigma_max"] = model.stats.sigma_max;
  j["stats"] = std::move(stats);
  j["objective_error"] = {model.objective_error.errlb, model.objective_error.errub};
  ordered_json cerrs = ordered_json::array();
  for (const auto& eb : model.constraint_errors) cerrs.push_back({eb.errlb, eb.errub});
  j["constraint_errors"] = std::move(cerrs);
  return j.dump(2) + "\n";
}

}  // namespace

ExportResult export_milp(const MilpModel& model, ExportFormat format) {
  ExportResult out;
  if (format == ExportFormat::NativeJson) {
    out.content = export_json(model);
  } else {
    out.content = export_mps(model, out);
  }
  return out;
}

MilpModel import_native_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  if (j.at("format").get<std::string>() != "polybound-milp-v1") {
    throw DomainError("unrecognized model dump format");
  }
  MilpModel model;
  model.name = j.at("name").get<std::string>();
  for (const auto& jv : j.at("vars")) {
    LiftedVar v;
    v.id = jv.at("id").get<LiftedId>();
    const std::string kind = jv.at("kind").get<std::string>();
    v.kind = kind == "u" ? LiftedKind::Unit
                         : (kind == "r" ? LiftedKind::Remainder : LiftedKind::Product);
    v.name = jv.at("name").get<std::string>();
    v.lower = jv.at("lower").get<double>();
    v.upper = jv.at("upper").get<double>();
    v.binary = jv.at("binary").get<bool>();
    v.var_index = jv.at("var_index").get<int>();
    v.bit = jv.at("bit").get<int>();
    model.vars.push_back(std::move(v));
  }
  model.objective = expr_from_json(j.at("objective"));
  for (const auto& jr : j.at("rows")) {
    LinearConstraintRow row;
    row.expr = expr_from_json(jr);
    row.rhs = jr.at("rhs").get<double>();
    model.rows.push_back(std::move(row));
  }
  model.phi_w_row_begin = j.at("phi_w_row_begin").get<std::size_t>();
  for (const auto& je : j.at("expansions")) {
    VariableExpansion ex;
    ex.var_index = je.at("var_index").get<int>();
    ex.alpha = je.at("alpha").get<double>();
    ex.beta = je.at("beta").get<double>();
    ex.kappa = je.at("kappa").get<double>();
    ex.sigma = je.at("sigma").get<int>();
    ex.discrete = je.at("discrete").get<bool>();
    ex.unit_ids = je.at("unit_ids").get<std::vector<LiftedId>>();
    if (je.contains("remainder_id")) ex.remainder_id = je.at("remainder_id").get<LiftedId>();
    ex.needs_upper_bound_constraint = je.at("needs_upper_bound_constraint").get<bool>();
    model.expansions.push_back(std::move(ex));
  }
  for (const auto& jp : j.at("products")) {
    UnitProduct up;
    up.id = jp.at("id").get<LiftedId>();
    const auto units = jp.at("unit_vars").get<std::vector<LiftedId>>();
    up.unit_vars.insert(units.begin(), units.end());
    if (jp.contains("remainder")) up.remainder = jp.at("remainder").get<LiftedId>();
    model.products.push_back(std::move(up));
  }
  const auto& stats = j.at("stats");
  model.stats.phi = stats.at("phi").get<int>();
  model.stats.psi = stats.at("psi").get<int>();
  model.stats.psi_pre_dedup = stats.at("psi_pre_dedup").get<long long>();
  model.stats.rho = stats.at("rho").get<int>();
  model.stats.rho_pre_dedup = stats.at("rho_pre_dedup").get<long long>();
  model.stats.t = stats.at("t").get<int>();
  model.stats.d = stats.at("d").get<int>();
  model.stats.sigma_max = stats.at("sigma_max").get<int>();
  model.objective_error.errlb = j.at("objective_error")[0].get<double>();
  model.objective_error.errub = j.at("objective_error")[1].get<double>();
  for (const auto& je : j.at("constraint_errors")) {
    model.constraint_errors.push_back({je[0].get<double>(), je[1].get<double>()});
  }
  return model;
}

}  // namespace polybound
