#include "floquet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace floquet {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;
// Residual changes below this are treated as roundoff in convergence sweeps.
constexpr double noise_floor = 1e-6;

std::string fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const json* find(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("config: " + path + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  const json* v = find(obj, key);
  return v ? number(*v, path + "." + key) : fallback;
}

int integer_or(const json& obj, const std::string& key, int fallback, const std::string& path) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError("config: " + path + "." + key + " must be an integer");
  return v->get<int>();
}

const json& object_or_empty(const json& obj, const std::string& key, const std::string& path) {
  static const json empty = json::object();
  const json* v = find(obj, key);
  if (!v) return empty;
  if (!v->is_object()) throw ConfigError("config: " + path + "." + key + " must be an object");
  return *v;
}

Check quantization_check(const IndexReport& r) {
  Check c;
  c.name = "quantized:" + r.kind;
  c.value = r.residual;
  c.passed = r.quantized;
  c.tolerance_bound = !r.quantized && r.residual < 0.25 && r.imag < 1e-3;
  std::ostringstream d;
  d << "raw=" << r.raw.real() << (r.raw.imag() < 0 ? "" : "+") << r.raw.imag() << "i integer=" << r.integer;
  c.detail = d.str();
  return c;
}

Check threshold_check(std::string name, double value, double limit, std::string detail = {}) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.passed = value < limit;
  std::ostringstream d;
  d << "limit " << limit;
  if (!detail.empty()) d << "; " << detail;
  c.detail = d.str();
  return c;
}

Check equality_check(std::string name, const IndexReport& a, const IndexReport& b) {
  Check c;
  c.name = std::move(name);
  c.value = std::abs(a.raw - b.raw);
  c.passed = a.integer == b.integer && a.quantized && b.quantized;
  c.tolerance_bound = a.integer == b.integer && !c.passed;
  c.detail = a.kind + "=" + std::to_string(a.integer) + " " + b.kind + "=" + std::to_string(b.integer);
  return c;
}

RelativeConfig relative_config(const ExperimentConfig& c) {
  RelativeConfig rc;
  rc.min_width = c.min_width;
  rc.evolution.samples_per_segment = c.quadrature.samples_per_segment;
  rc.quadrature = c.quadrature;
  rc.tol = c.tol;
  rc.placement = c.placement;
  rc.compute_edge = c.edge;
  return rc;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CellResult evaluate(const ExperimentConfig& c, int L, double eps, RelativeGapResult* keep) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = bulk_geometry(c, L);
  const auto p = build_protocol(c, g);
  const auto map = edge_map(g);
  const auto rc = relative_config(c);
  auto r = relative_gap_indices(p, eps, map, rc);

  CellResult cell;
  cell.model = c.model.name;
  cell.L = L;
  cell.epsilon = eps;
  cell.gap = r.gap;
  cell.indices.push_back(r.bulk);
  cell.checks.push_back(quantization_check(r.bulk));
  cell.checks.push_back(threshold_check("relative_loop", r.loop_defect, c.tol.loop));
  if (c.edge) {
    cell.indices.push_back(r.edge);
    cell.indices.push_back(r.edge_two_term);
    cell.checks.push_back(quantization_check(r.edge));
    cell.checks.push_back(equality_check("equality:bulk_rel=edge_rel", r.bulk, r.edge));
    cell.checks.push_back(quantization_check(r.edge_two_term));
    cell.checks.push_back(equality_check("equality:edge_rel=edge_two_term", r.edge, r.edge_two_term));
  }
  const Index n = g.dim();
  if ((r.one_period - Matrix::Identity(n, n)).norm() < c.tol.loop) {
    // U(T) = I: the loop formulas apply to the drive itself
    const auto traj = evolve(p, rc.evolution);
    const auto sw = bulk_switches(g, c.placement);
    auto direct = bulk_index(traj, sw.s1, sw.s2, sw.window, c.quadrature, c.tol);
    direct.kind = "bulk_direct";
    cell.indices.push_back(direct);
    cell.checks.push_back(quantization_check(direct));
    if (c.edge) {
      const auto es = edge_switches(map.target, c.placement);
      const auto ue = evolve(restrict_protocol(p, map), rc.evolution);
      auto edge = edge_index({map.target, ue.final_unitary()}, es.s2, es.window, c.tol);
      edge.kind = "edge_direct";
      cell.indices.push_back(edge);
      cell.checks.push_back(quantization_check(edge));
      cell.checks.push_back(equality_check("equality:bulk_direct=edge_direct", direct, edge));
    }
  }
  cell.runtime_s = elapsed(t0);
  if (keep) *keep = std::move(r);
  return cell;
}

json report_json(const IndexReport& r) {
  return {{"kind", r.kind},
          {"raw", {r.raw.real(), r.raw.imag()}},
          {"integer", r.integer},
          {"residual", r.residual},
          {"imag", r.imag},
          {"quantized", r.quantized},
          {"window", {{"r1", r.window_r1}, {"r2", r.window_r2}}},
          {"switch_jumps", r.switch_jumps},
          {"quadrature", r.quadrature},
          {"L", r.L},
          {"flags", r.flags}};
}

json check_json(const Check& c) {
  return {{"name", c.name},
          {"value", c.value},
          {"verdict", c.passed ? "pass" : (c.tolerance_bound ? "fail (tolerance-bound)" : "fail")},
          {"detail", c.detail}};
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    const auto at = what.find("parse error");
    throw ConfigError("config " + (at == std::string::npos ? what : what.substr(at)));
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig c;
  c.source = j.dump();

  const json* schema = find(j, "schema");
  if (!schema || !schema->is_string() || schema->get<std::string>() != config_schema)
    throw ConfigError(std::string("config: schema must be \"") + config_schema + "\"");

  const json* model = find(j, "model");
  if (!model || !model->is_object()) throw ConfigError("config: model must be an object");
  const json* name = find(*model, "name");
  if (!name || !name->is_string()) throw ConfigError("config: model.name must be a string");
  c.model.name = name->get<std::string>();
  if (c.model.name == "five_step") {
    const json* J = find(*model, "J");
    if (!J) throw ConfigError("config: model.J is required for five_step");
    if (J->is_string()) {
      if (J->get<std::string>() != "full") throw ConfigError("config: model.J must be a number or \"full\"");
      c.model.J = std::numeric_limits<double>::quiet_NaN();
    } else {
      c.model.J = number(*J, "model.J");
    }
    c.model.delta = number_or(*model, "delta", 0.0, "model");
  } else if (c.model.name == "chern_static") {
    c.model.mass = number_or(*model, "mass", -1.0, "model");
  } else if (c.model.name != "zero") {
    throw ConfigError("config: unknown model.name \"" + c.model.name + "\" (five_step, chern_static, zero)");
  }

  c.period = number_or(j, "period", 1.0, "");
  if (!(c.period > 0)) throw ConfigError("config: period must be positive");

  if (const json* sizes = find(j, "sizes")) {
    if (!sizes->is_array() || sizes->empty()) throw ConfigError("config: sizes must be a non-empty array");
    c.sizes.clear();
    for (std::size_t i = 0; i < sizes->size(); ++i) {
      const auto& v = (*sizes)[i];
      if (!v.is_number_integer() || v.get<int>() < 4 || v.get<int>() % 4)
        throw ConfigError("config: sizes[" + std::to_string(i) + "] must be a multiple of 4, at least 4");
      c.sizes.push_back(v.get<int>());
    }
  }

  const json* min_width = find(j, "min_width");
  if (!min_width) throw ConfigError("config: min_width is required (smallest accepted gap, in radians)");
  c.min_width = number(*min_width, "min_width");
  if (!(c.min_width > 0)) throw ConfigError("config: min_width must be positive");

  const json* eps = find(j, "epsilon");
  if (!eps || (eps->is_string() && eps->get<std::string>() == "auto")) {
    c.auto_epsilon = true;
  } else if (eps->is_array() && !eps->empty()) {
    c.auto_epsilon = false;
    double unit = 1.0;
    if (const json* u = find(j, "epsilon_unit")) {
      if (!u->is_string()) throw ConfigError("config: epsilon_unit must be a string");
      if (u->get<std::string>() == "pi_over_T")
        unit = pi / c.period;
      else if (u->get<std::string>() != "absolute")
        throw ConfigError("config: epsilon_unit must be \"absolute\" or \"pi_over_T\"");
    }
    for (std::size_t i = 0; i < eps->size(); ++i)
      c.epsilon.push_back(unit * number((*eps)[i], "epsilon[" + std::to_string(i) + "]"));
  } else {
    throw ConfigError("config: epsilon must be \"auto\" or a non-empty array of numbers");
  }

  const auto& dis = object_or_empty(j, "disorder", "");
  c.disorder.amplitude = number_or(dis, "amplitude", 0.0, "disorder");
  if (c.disorder.amplitude < 0) throw ConfigError("config: disorder.amplitude must be non-negative");
  c.disorder.seed = std::uint64_t(integer_or(dis, "seed", 1, "disorder"));

  const auto& sw = object_or_empty(j, "switch", "");
  if (const json* kind = find(sw, "kind")) {
    if (!kind->is_string() || (kind->get<std::string>() != "sharp" && kind->get<std::string>() != "smooth"))
      throw ConfigError("config: switch.kind must be \"sharp\" or \"smooth\"");
    c.placement.kind = kind->get<std::string>() == "smooth" ? SwitchKind::smooth : SwitchKind::sharp;
  }
  c.placement.width = number_or(sw, "width", 4.0, "switch");
  c.placement.c1 = integer_or(sw, "c1", 0, "switch");
  c.placement.c2 = integer_or(sw, "c2", 0, "switch");
  c.placement.bulk_radius1 = integer_or(sw, "bulk_radius1", 0, "switch");
  c.placement.bulk_radius2 = integer_or(sw, "bulk_radius2", 0, "switch");
  c.placement.edge_radius = integer_or(sw, "edge_radius", 0, "switch");

  const auto& q = object_or_empty(j, "quadrature", "");
  c.quadrature.samples_per_segment = integer_or(q, "samples_per_segment", 16, "quadrature");
  if (c.quadrature.samples_per_segment < 2 || c.quadrature.samples_per_segment % 2)
    throw ConfigError("config: quadrature.samples_per_segment must be even and at least 2");
  if (const json* r = find(q, "check_refinement")) {
    if (!r->is_boolean()) throw ConfigError("config: quadrature.check_refinement must be a boolean");
    c.quadrature.check_refinement = r->get<bool>();
  }

  const auto& tol = object_or_empty(j, "tolerances", "");
  c.tol.quant = number_or(tol, "quant", c.tol.quant, "tolerances");
  c.tol.imag = number_or(tol, "imag", c.tol.imag, "tolerances");
  c.tol.loop = number_or(tol, "loop", c.tol.loop, "tolerances");
  c.tol.refinement = number_or(tol, "refinement", c.tol.refinement, "tolerances");
  if (!(c.tol.quant > 0 && c.tol.imag > 0 && c.tol.loop > 0 && c.tol.refinement > 0))
    throw ConfigError("config: all tolerances must be positive");

  if (const json* e = find(j, "edge")) {
    if (!e->is_boolean()) throw ConfigError("config: edge must be a boolean");
    c.edge = e->get<bool>();
  }
  if (const json* s = find(j, "seed")) {
    if (!s->is_number_unsigned()) throw ConfigError("config: seed must be a non-negative integer");
    c.seed = s->get<std::uint64_t>();
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

LatticeGeometry bulk_geometry(const ExperimentConfig&, int L) { return centered_torus(L, L, 2); }

DriveProtocol build_protocol(const ExperimentConfig& c, const LatticeGeometry& g) {
  DriveProtocol p;
  if (c.model.name == "five_step") {
    const double J = std::isnan(c.model.J) ? full_coupling(c.period) : c.model.J;
    p = five_step_drive(g, J, c.model.delta, c.period);
  } else if (c.model.name == "chern_static") {
    p = static_drive(chern_insulator(c.model.mass), g, c.period);
  } else {
    p = static_drive(LatticeOperator::zero(g), c.period);
  }
  if (c.disorder.amplitude > 0) p = add_onsite_disorder(p, c.disorder);
  return p;
}

RestrictionMap edge_map(const LatticeGeometry& bulk) { return half_plane_map(bulk, 0, bulk.L1 / 2); }

bool RunReport::all_passed() const {
  for (const auto& cell : cells)
    for (const auto& c : cell.checks)
      if (!c.passed) return false;
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::vector<double> target_epsilons(const ExperimentConfig& c, int L) {
  if (!c.auto_epsilon) return c.epsilon;
  const auto g = bulk_geometry(c, L);
  const auto traj = evolve(build_protocol(c, g), {c.quadrature.samples_per_segment, true, 1e-12});
  const auto gaps = find_gaps(eigendecompose_unitary(traj.final_unitary()), c.min_width, c.period);
  if (gaps.empty())
    throw std::runtime_error("gap validation failed: no gap wider than min_width at L=" + std::to_string(L));
  std::vector<double> out;
  for (const auto& gp : gaps) out.push_back(gp.epsilon);
  std::sort(out.begin(), out.end());
  return out;
}

CellResult run_cell(const ExperimentConfig& c, int L, double eps) { return evaluate(c, L, eps, nullptr); }

RunReport run_experiment(const ExperimentConfig& c) {
  RunReport r;
  r.config_hash = fnv1a(c.source);
  for (int L : c.sizes)
    for (double eps : target_epsilons(c, L)) r.cells.push_back(run_cell(c, L, eps));
  return r;
}

RunReport convergence_sweep(const ExperimentConfig& c, const std::vector<int>& sizes_in) {
  if (sizes_in.size() < 2) throw ConfigError("sweep: needs at least 2 sizes");
  std::vector<int> sizes = sizes_in;
  std::sort(sizes.begin(), sizes.end());
  RunReport r;
  r.config_hash = fnv1a(c.source);
  ExperimentConfig fixed = c;
  fixed.epsilon = target_epsilons(c, sizes.front());
  fixed.auto_epsilon = false;
  for (int L : sizes)
    for (double eps : fixed.epsilon) r.cells.push_back(run_cell(fixed, L, eps));

  // residual sequences keyed by (epsilon index, kind)
  std::map<std::pair<std::size_t, std::string>, std::vector<std::pair<int, double>>> series;
  for (const auto& cell : r.cells) {
    const auto e = std::size_t(std::find(fixed.epsilon.begin(), fixed.epsilon.end(), cell.epsilon) -
                               fixed.epsilon.begin());
    for (const auto& idx : cell.indices) series[{e, idx.kind}].push_back({cell.L, idx.residual});
  }
  for (const auto& [key, seq] : series) {
    const std::string label = key.second + "@eps=" + fmt(fixed.epsilon[key.first]);
    for (std::size_t i = 1; i < seq.size(); ++i)
      if (seq[i].second > seq[i - 1].second + noise_floor)
        r.warnings.push_back("non-monotone residual for " + label + ": L=" + std::to_string(seq[i - 1].first) +
                             " -> " + fmt(seq[i - 1].second) + ", L=" + std::to_string(seq[i].first) + " -> " +
                             fmt(seq[i].second));
    Check ch;
    ch.name = "convergence:" + label;
    ch.value = seq.back().second;
    ch.passed = seq.back().second <= seq.front().second + noise_floor || seq.back().second < noise_floor;
    ch.detail = "residual(L=" + std::to_string(seq.front().first) + ")=" + fmt(seq.front().second) +
                " residual(L=" + std::to_string(seq.back().first) + ")=" + fmt(seq.back().second);
    r.checks.push_back(ch);
  }
  return r;
}

RunReport verify_suite(const ExperimentConfig& c, bool full) {
  RunReport rep;
  rep.config_hash = fnv1a(c.source);
  const int L = c.sizes.front();
  const double T = c.period;
  const auto g = bulk_geometry(c, L);
  const auto p = build_protocol(c, g);
  const auto map = edge_map(g);
  const auto rc = relative_config(c);
  const auto eps_list = target_epsilons(c, L);

  std::vector<RelativeGapResult> results;
  for (double eps : eps_list) {
    RelativeGapResult keep;
    rep.cells.push_back(evaluate(c, L, eps, &keep));
    results.push_back(std::move(keep));
  }
  const auto& first = results.front();
  for (std::size_t k = 0; k < results.size(); ++k) {
    const double d = (exp_hermitian(results[k].effective_hamiltonian.m, T) - first.one_period).norm();
    rep.checks.push_back(threshold_check("effective_hamiltonian_exponent@eps=" + fmt(eps_list[k]), d, 1e-8));
  }

  if (p.segments.size() == 1) {
    // static generator: place eps below the spectrum, in the gap at infinity
    const auto e = hermitian_eigen(p.segments[0].generator.m);
    const double lo = e.values.minCoeff(), hi = e.values.maxCoeff();
    const double free = 2 * pi / T - (hi - lo);
    if (free * T > c.min_width) {
      auto cfg = rc;
      cfg.compute_edge = false;
      const auto r = relative_gap_indices(p, lo - 0.5 * free, map, cfg);
      Check ch = quantization_check(r.bulk);
      ch.name = "gap_at_infinity_index_zero";
      ch.passed = ch.passed && r.bulk.integer == 0;
      rep.checks.push_back(ch);
    } else {
      rep.warnings.push_back("gap at infinity narrower than min_width; check skipped");
    }
  }

  if (!full) return rep;

  const auto sw = bulk_switches(g, c.placement);
  auto forward = std::make_shared<PropagatorTrajectory>(evolve(p, rc.evolution));
  auto rel = std::make_shared<PropagatorTrajectory>(
      evolve(relative_protocol(p, effective_vacuum_protocol(first.effective_hamiltonian, T)), rc.evolution));

  const auto add = additivity_check(rel, rel, sw, c.quadrature, c.tol);
  rep.checks.push_back(threshold_check("additivity", add.defect, 0.05,
                                       "I[UU]=" + fmt(add.lhs) + " I[U]+I[U]=" + fmt(add.rhs)));

  const double eps_a = eps_list.front();
  const double eps_b = eps_list.size() > 1 ? eps_list[1] : eps_a + 2 * pi / T;
  auto cfg = rc;
  cfg.compute_edge = false;
  const auto shift = epsilon_shift_check(p, eps_a, eps_b, map, cfg);
  rep.checks.push_back(threshold_check("epsilon_shift", shift.defect, 0.1,
                                       "dI_B=" + fmt(shift.delta_bulk) + " c=" + fmt(shift.chern.raw.real())));

  {
    auto moved = c;
    moved.placement.c1 += 1;
    moved.placement.c2 -= 1;
    const auto r = relative_gap_indices(p, eps_a, map, relative_config(moved));
    rep.checks.push_back(
        threshold_check("switch_displacement:bulk", std::abs(r.bulk.raw - first.bulk.raw), 1e-3));
    if (c.edge)
      rep.checks.push_back(
          threshold_check("switch_displacement:edge", std::abs(r.edge.raw - first.edge.raw), 1e-3));
  }

  {
    const auto e = hermitian_eigen(first.effective_hamiltonian.m);
    const Matrix v = e.vectors.leftCols(e.vectors.cols() / 2);
    RealVector p1 = RealVector::Zero(g.dim());
    for (Index i = 0; i < g.dim(); ++i) p1(i) = g.coord1(i / g.n_orb) >= c.placement.c1 ? 1.0 : 0.0;
    std::vector<double> times{0.3 * T, 0.55 * T, 0.8 * T};
    for (const auto& row :
         algebraic_identity_suite(*forward, *rel, sw.s1.diag, sw.s2.diag, p1, v * v.adjoint(), times, c.seed))
      rep.checks.push_back(threshold_check("identity:" + row.name, row.defect, 1e-8));
  }

  {
    const auto fit = decay_rate_fit(first.effective_hamiltonian);
    Check ch;
    ch.name = "decay:effective_hamiltonian";
    ch.value = fit.exponent;
    ch.passed = fit.exponent > 0 && (std::isinf(fit.exponent) || fit.residual < 0.2 * fit.exponent);
    ch.detail = "lambda=" + fmt(fit.exponent) + " residual=" + fmt(fit.residual);
    rep.checks.push_back(ch);
  }
  return rep;
}

json to_json(const RunReport& r, const ExperimentConfig& c) {
  json cells = json::array();
  for (const auto& cell : r.cells) {
    json idx = json::array(), chk = json::array();
    for (const auto& i : cell.indices) idx.push_back(report_json(i));
    for (const auto& k : cell.checks) chk.push_back(check_json(k));
    cells.push_back({{"model", cell.model},
                     {"L", cell.L},
                     {"epsilon", cell.epsilon},
                     {"gap",
                      {{"epsilon_mid", cell.gap.epsilon},
                       {"phase_begin", cell.gap.phase_begin},
                       {"phase_end", cell.gap.phase_end},
                       {"width", cell.gap.width}}},
                     {"indices", idx},
                     {"checks", chk},
                     {"runtime_s", cell.runtime_s}});
  }
  json checks = json::array();
  for (const auto& k : r.checks) checks.push_back(check_json(k));
  return {{"schema", report_schema},
          {"provenance",
           {{"config_hash", r.config_hash}, {"library_version", library_version}, {"seed", c.seed}}},
          {"period", c.period},
          {"cells", cells},
          {"checks", checks},
          {"warnings", r.warnings},
          {"all_passed", r.all_passed()}};
}

std::string to_csv(const RunReport& r) {
  std::ostringstream out;
  out << table_header << '\n';
  for (const auto& cell : r.cells)
    for (const auto& i : cell.indices)
      out << cell.model << ',' << cell.L << ',' << fmt(cell.epsilon) << ',' << i.kind << ',' << fmt(i.raw.real())
          << ',' << fmt(i.raw.imag()) << ',' << i.integer << ',' << fmt(i.residual) << ',' << fmt(i.window_r1)
          << ',' << fmt(cell.runtime_s) << '\n';
  return out.str();
}

void write_report(const RunReport& r, const ExperimentConfig& c, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(std::filesystem::path(dir) / "report.json") << to_json(r, c).dump(2) << '\n';
  std::ofstream(std::filesystem::path(dir) / "table.csv") << to_csv(r);
}

}  // namespace floquet
