// avgop: ball-averaging operators on finite metric measure spaces and the
// diagnostics built on them. Subcommands: diagnose, operator, certify,
// counterexample, verify-bounds. Exit codes: 0 pass, 1 check failure,
// 2 input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avgop/avgop.hpp"
#include "avgop/io.hpp"

namespace {

using avgop::ordered_json;

bool g_verbose = false;

void note(const std::string& message) {
  if (g_verbose) std::cerr << "avgop: " << message << "\n";
}

ordered_json json_p(double p) {
  if (std::isinf(p)) return ordered_json("inf");
  return ordered_json(p);
}

void emit(const std::string& content, const std::string& output_path) {
  if (output_path.empty() || output_path == "-") {
    std::cout << content;
  } else {
    avgop::write_text_file(output_path, content);
  }
}

ordered_json report_header(const char* subcommand, const std::string& space_path) {
  ordered_json doc;
  doc["tool"] = "avgop";
  doc["subcommand"] = subcommand;
  if (!space_path.empty()) doc["space"] = space_path;
  return doc;
}

// --------------------------------------------------------------------------
// diagnose
// --------------------------------------------------------------------------

struct DiagnoseConfig {
  std::string space_path;
  std::vector<double> s_values;
  int grid = 64;
  bool validate_triangle = false;
  bool csv = false;
  std::string output;
};

int run_diagnose(const DiagnoseConfig& cfg) {
  const avgop::MetricMeasureSpace space = avgop::load_space(cfg.space_path);
  note("loaded space with " + std::to_string(space.size()) + " points");

  std::vector<avgop::RegularityReport> sections;
  for (double s : cfg.s_values)
    sections.push_back(avgop::build_regularity_report(space, s, cfg.grid));

  if (cfg.csv) {
    std::ostringstream out;
    out << "# star_modulus\ns,delta,value,argmax\n";
    for (const auto& sec : sections)
      for (const auto& row : sec.star_rows)
        out << avgop::fmt17(sec.s) << ',' << avgop::fmt17(row.delta) << ','
            << avgop::fmt17(row.value) << ',' << row.arg_x << '\n';
    out << "# symdiff_modulus\ns,delta,value,arg_x,arg_y\n";
    for (const auto& sec : sections)
      for (const auto& row : sec.symdiff_rows)
        out << avgop::fmt17(sec.s) << ',' << avgop::fmt17(row.delta) << ','
            << avgop::fmt17(row.value) << ',' << row.arg_x << ',' << row.arg_y << '\n';
    out << "# inverse_gap\ns,delta,max_gap,bound\n";
    for (const auto& sec : sections)
      for (const auto& row : sec.gap_rows)
        out << avgop::fmt17(sec.s) << ',' << avgop::fmt17(row.delta) << ','
            << avgop::fmt17(row.max_gap) << ',' << avgop::fmt17(row.bound) << '\n';
    emit(out.str(), cfg.output);
    return 0;
  }

  ordered_json doc = report_header("diagnose", cfg.space_path);
  doc["grid"] = cfg.grid;
  if (cfg.validate_triangle) {
    const auto violation = avgop::triangle_violation(space);
    ordered_json tri;
    tri["checked"] = true;
    if (violation) {
      tri["violation"] = ordered_json::array({(*violation)[0], (*violation)[1], (*violation)[2]});
    } else {
      tri["violation"] = nullptr;
    }
    doc["triangle_check"] = std::move(tri);
  }
  ordered_json secs = ordered_json::array();
  for (const auto& sec : sections) {
    ordered_json j;
    j["s"] = sec.s;
    j["gamma"] = {{"value", sec.gamma.value}, {"argmax", sec.gamma.arg}};
    j["inf_ball"] = sec.inf_ball;
    ordered_json star = ordered_json::array();
    for (const auto& row : sec.star_rows)
      star.push_back({{"delta", row.delta}, {"value", row.value}, {"argmax", row.arg_x}});
    j["star_modulus"] = std::move(star);
    ordered_json sym = ordered_json::array();
    for (const auto& row : sec.symdiff_rows)
      sym.push_back({{"delta", row.delta},
                     {"value", row.value},
                     {"arg_x", row.arg_x},
                     {"arg_y", row.arg_y}});
    j["symdiff_modulus"] = std::move(sym);
    ordered_json gap = ordered_json::array();
    for (const auto& row : sec.gap_rows)
      gap.push_back({{"delta", row.delta}, {"max_gap", row.max_gap}, {"bound", row.bound}});
    j["inverse_gap"] = std::move(gap);
    j["total_boundedness"] = {{"net_size", sec.boundedness.net_size},
                            {"inf_ball", sec.boundedness.inf_ball},
                            {"doubling", sec.boundedness.doubling},
                            {"net", sec.boundedness.net}};
    secs.push_back(std::move(j));
  }
  doc["sections"] = std::move(secs);
  emit(avgop::dump_json17(doc), cfg.output);
  return 0;
}

// --------------------------------------------------------------------------
// operator
// --------------------------------------------------------------------------

struct OperatorConfig {
  std::string space_path;
  double r = 1.0;
  std::string export_path;
  std::string output;
};

int run_operator(const OperatorConfig& cfg) {
  const avgop::MetricMeasureSpace space = avgop::load_space(cfg.space_path);
  const avgop::AveragingOperator op = avgop::assemble(space, cfg.r);
  note("assembled operator at radius " + avgop::fmt17(cfg.r));

  long nnz = 0;
  for (const auto& row : op.rows) nnz += static_cast<long>(row.size());

  if (!cfg.export_path.empty()) {
    std::ostringstream triplets;
    avgop::export_operator_triplets(op, triplets);
    avgop::write_text_file(cfg.export_path, triplets.str());
  }

  ordered_json doc = report_header("operator", cfg.space_path);
  doc["r"] = cfg.r;
  doc["n"] = op.n;
  doc["nnz"] = nnz;
  doc["operator_norm_1"] = avgop::operator_norm(space, op, 1.0);
  doc["operator_norm_inf"] = avgop::operator_norm(space, op, avgop::kInfinity);
  doc["export"] = cfg.export_path.empty() ? ordered_json(nullptr) : ordered_json(cfg.export_path);
  emit(avgop::dump_json17(doc), cfg.output);
  return 0;
}

// --------------------------------------------------------------------------
// certify
// --------------------------------------------------------------------------

struct CertifyConfig {
  std::string space_path;
  double r = 1.0;
  std::string p_text = "1";
  double epsilon = 0.5;
  std::string family_spec;
  std::string subset_spec = "all";
  int grid = 64;
  bool full = false;
  std::string output;
};

double parse_p_text(const std::string& text) {
  if (text == "inf") return avgop::kInfinity;
  try {
    std::size_t pos = 0;
    const double p = std::stod(text, &pos);
    if (pos != text.size() || !(p >= 1.0)) throw std::invalid_argument(text);
    return p;
  } catch (const std::exception&) {
    throw avgop::ValidationError("p", "must be a number in [1, inf) or the string \"inf\", got \"" +
                                          text + "\"");
  }
}

avgop::FamilySpec resolve_family(const avgop::MetricMeasureSpace& space, double p,
                                 const std::string& spec) {
  if (spec.rfind("sample:", 0) == 0) {
    const std::string rest = spec.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw avgop::ValidationError("family", "expected sample:COUNT:SEED, got \"" + spec + "\"");
    int count = 0;
    std::uint64_t seed = 0;
    try {
      count = std::stoi(rest.substr(0, colon));
      seed = std::stoull(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw avgop::ValidationError("family", "expected sample:COUNT:SEED, got \"" + spec + "\"");
    }
    return avgop::unit_ball_sample(space, p, count, seed);
  }
  avgop::FamilySpec fam = avgop::load_family(space, spec);
  if (fam.p != p && !(std::isinf(fam.p) && std::isinf(p)))
    throw avgop::ValidationError("family", "family file p does not match --p");
  return fam;
}

avgop::IndexSet resolve_subset(const avgop::MetricMeasureSpace& space, const std::string& spec) {
  if (spec == "all") return avgop::full_set(space);
  if (spec.rfind("ball:", 0) == 0) {
    const std::string rest = spec.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw avgop::ValidationError("subset", "expected ball:CENTER:RADIUS, got \"" + spec + "\"");
    try {
      const int center = std::stoi(rest.substr(0, colon));
      const double radius = std::stod(rest.substr(colon + 1));
      return avgop::ball(space, center, radius);
    } catch (const std::out_of_range&) {
      throw;
    } catch (const std::exception&) {
      throw avgop::ValidationError("subset", "expected ball:CENTER:RADIUS, got \"" + spec + "\"");
    }
  }
  throw avgop::ValidationError("subset", "expected \"all\" or ball:CENTER:RADIUS, got \"" + spec + "\"");
}

int run_certify(const CertifyConfig& cfg) {
  const avgop::MetricMeasureSpace space = avgop::load_space(cfg.space_path);
  const double p = parse_p_text(cfg.p_text);
  const avgop::FamilySpec family = resolve_family(space, p, cfg.family_spec);
  const avgop::IndexSet subset = resolve_subset(space, cfg.subset_spec);
  note("certifying a family of " + std::to_string(family.functions.size()) +
       " members over a subset of " + std::to_string(subset.size()) + " points");

  ordered_json doc = report_header("certify", cfg.space_path);
  doc["r"] = cfg.r;
  doc["p"] = json_p(p);
  doc["epsilon"] = cfg.epsilon;
  doc["family"] = cfg.family_spec;
  doc["family_size"] = static_cast<int>(family.functions.size());
  doc["subset"] = cfg.subset_spec;
  doc["subset_size"] = subset.size();
  doc["grid"] = cfg.grid;

  try {
    const avgop::NetCertificate cert =
        avgop::build_net_certificate(space, cfg.r, family, subset, cfg.epsilon, cfg.grid);
    const avgop::AveragingOperator op = avgop::assemble(space, cfg.r);
    const avgop::CertificateCheck chk = avgop::verify_certificate(space, op, cert, family);

    doc["status"] = "ok";
    doc["delta"] = cert.delta;
    doc["grid_step"] = cert.grid_step;
    doc["num_centers"] = static_cast<int>(cert.centers.size());
    doc["occupied_count"] = static_cast<int>(cert.occupied.size());
    doc["achieved_radius"] = cert.achieved_radius;
    if (!std::isinf(p)) {
      const avgop::IndexSet tail = avgop::complement(space, subset);
      double tail_norm = 0.0;
      for (const auto& f : family.functions)
        tail_norm = std::max(tail_norm, avgop::norm_p_on(space, f, p, tail));
      doc["tail_norm"] = tail_norm;
    } else {
      doc["tail_norm"] = nullptr;
    }
    doc["verification"] = {{"achieved_radius", chk.achieved_radius},
                           {"worst_member", chk.worst_member},
                           {"pass", chk.pass}};
    if (cfg.full) {
      ordered_json cj;
      cj["centers"] = cert.centers;
      ordered_json grids = ordered_json::array();
      for (const auto& g : cert.grids) grids.push_back(g);
      cj["grids"] = std::move(grids);
      ordered_json occ = ordered_json::array();
      for (const auto& t : cert.occupied) occ.push_back(t);
      cj["occupied"] = std::move(occ);
      cj["representatives"] = cert.representatives;
      cj["member_tuple"] = cert.member_tuple;
      doc["certificate"] = std::move(cj);
    }
    emit(avgop::dump_json17(doc), cfg.output);
    return chk.pass ? 0 : 1;
  } catch (const avgop::CertificateError& e) {
    doc["status"] = "construction_failed";
    doc["reason"] = e.what();
    emit(avgop::dump_json17(doc), cfg.output);
    return 1;
  }
}

// --------------------------------------------------------------------------
// counterexample
// --------------------------------------------------------------------------

struct CounterexampleConfig {
  std::string space_path;
  double s = 1.0;
  std::string mode_text = "l1";
  std::vector<double> sweep;
  bool full = false;
  bool csv = false;
  std::string output;
};

int run_counterexample(const CounterexampleConfig& cfg) {
  avgop::WitnessMode mode;
  if (cfg.mode_text == "l1") {
    mode = avgop::WitnessMode::l1;
  } else if (cfg.mode_text == "linf") {
    mode = avgop::WitnessMode::linf;
  } else {
    throw avgop::ValidationError("mode", "expected l1 or linf, got \"" + cfg.mode_text + "\"");
  }

  if (!cfg.sweep.empty()) {
    const auto rows = avgop::dichotomy_sweep(cfg.sweep, cfg.s, mode);
    bool all_pass = true;
    for (const auto& row : rows) all_pass = all_pass && row.pass;

    if (cfg.csv) {
      std::ostringstream out;
      out << "L,num_centers,min_pairwise,c_bound,covering_epsilon,covering_number,pass\n";
      for (const auto& row : rows) {
        out << avgop::fmt17(row.length) << ',' << row.num_centers << ','
            << (row.min_pairwise ? avgop::fmt17(*row.min_pairwise) : std::string())
            << ',' << avgop::fmt17(row.c_bound) << ',' << avgop::fmt17(row.covering_epsilon)
            << ',' << row.covering << ',' << (row.pass ? 1 : 0) << '\n';
      }
      emit(out.str(), cfg.output);
      return all_pass ? 0 : 1;
    }

    ordered_json doc = report_header("counterexample", cfg.space_path);
    doc["s"] = cfg.s;
    doc["mode"] = cfg.mode_text;
    ordered_json jrows = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json j;
      j["L"] = row.length;
      j["num_centers"] = row.num_centers;
      j["min_pairwise"] = row.min_pairwise ? ordered_json(*row.min_pairwise) : ordered_json(nullptr);
      j["c_bound"] = row.c_bound;
      j["covering_epsilon"] = row.covering_epsilon;
      j["covering_number"] = row.covering;
      j["pass"] = row.pass;
      jrows.push_back(std::move(j));
    }
    doc["sweep"] = std::move(jrows);
    doc["pass"] = all_pass;
    emit(avgop::dump_json17(doc), cfg.output);
    return all_pass ? 0 : 1;
  }

  if (cfg.space_path.empty())
    throw avgop::ValidationError("space", "required unless --sweep is given");
  const avgop::MetricMeasureSpace space = avgop::load_space(cfg.space_path);
  const avgop::WitnessFamily fam = mode == avgop::WitnessMode::l1
                                       ? avgop::l1_witnesses(space, cfg.s)
                                       : avgop::linf_witnesses(space, cfg.s);
  const avgop::SeparationCheck chk = avgop::verify_separation(space, fam);

  ordered_json doc = report_header("counterexample", cfg.space_path);
  doc["s"] = cfg.s;
  doc["mode"] = cfg.mode_text;
  doc["num_centers"] = static_cast<int>(fam.centers.size());
  doc["centers"] = fam.centers;
  doc["c_bound"] = fam.c_bound;
  doc["bound"] = chk.bound;
  doc["min_pairwise"] = chk.min_pairwise ? ordered_json(*chk.min_pairwise) : ordered_json(nullptr);
  doc["arg_pair"] = chk.arg_a >= 0 ? ordered_json::array({chk.arg_a, chk.arg_b})
                                   : ordered_json(nullptr);
  doc["pass"] = chk.pass;
  if (cfg.full) {
    const std::size_t k = fam.centers.size();
    ordered_json matrix = ordered_json::array();
    for (std::size_t a = 0; a < k; ++a) {
      ordered_json row = ordered_json::array();
      for (std::size_t b = 0; b < k; ++b) row.push_back(fam.separation_matrix[a * k + b]);
      matrix.push_back(std::move(row));
    }
    doc["separation_matrix"] = std::move(matrix);
  }
  emit(avgop::dump_json17(doc), cfg.output);
  return chk.pass ? 0 : 1;
}

// --------------------------------------------------------------------------
// verify-bounds
// --------------------------------------------------------------------------

struct VerifyBoundsConfig {
  std::string space_path;
  std::uint64_t seed = 0;
  long trials = 1000;
  std::string output;
};

int run_verify_bounds(const VerifyBoundsConfig& cfg) {
  const avgop::MetricMeasureSpace space = avgop::load_space(cfg.space_path);
  note("running " + std::to_string(cfg.trials) + " randomized trials with seed " +
       std::to_string(cfg.seed));
  const avgop::BatteryReport rep = avgop::run_inequality_battery(space, cfg.seed, cfg.trials);

  ordered_json doc = report_header("verify-bounds", cfg.space_path);
  doc["seed"] = cfg.seed;
  doc["trials"] = rep.trials;
  ordered_json checks;
  for (const auto& [name, count] : rep.checks_run) checks[name] = count;
  doc["checks_run"] = std::move(checks);
  ordered_json violations = ordered_json::array();
  for (const auto& v : rep.violations) {
    ordered_json j;
    j["check"] = v.check;
    j["s"] = v.s;
    j["delta"] = v.delta;
    j["x"] = v.x;
    j["y"] = v.y;
    j["lhs"] = v.lhs;
    j["rhs"] = v.rhs;
    j["f"] = v.f;
    violations.push_back(std::move(j));
  }
  doc["violations"] = std::move(violations);
  doc["pass"] = rep.pass();
  emit(avgop::dump_json17(doc), cfg.output);
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ball-averaging operators on finite metric measure spaces: "
               "regularity diagnostics, compactness certificates, separated witness families"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", g_verbose, "print progress notes to stderr");

  DiagnoseConfig diag_cfg;
  auto* diag = app.add_subcommand("diagnose",
                                  "doubling constant, annulus and symmetric-difference moduli, "
                                  "inverse-measure gaps, net/infimum/doubling triple");
  diag->add_option("--space", diag_cfg.space_path, "space document (JSON)")->required();
  diag->add_option("--s", diag_cfg.s_values, "scale(s) to analyze")->required()->delimiter(',');
  diag->add_option("--grid", diag_cfg.grid, "delta grid resolution (default 64)");
  diag->add_flag("--validate-triangle", diag_cfg.validate_triangle,
                 "check the triangle inequality (O(n^3))");
  diag->add_flag("--csv", diag_cfg.csv, "emit flat CSV tables instead of JSON");
  diag->add_option("-o,--output", diag_cfg.output, "output path (default stdout)");

  OperatorConfig op_cfg;
  auto* opc = app.add_subcommand("operator", "assemble the averaging operator; optional sparse export");
  opc->add_option("--space", op_cfg.space_path, "space document (JSON)")->required();
  opc->add_option("--r", op_cfg.r, "averaging radius")->required();
  opc->add_option("--export", op_cfg.export_path, "write sparse triplets (i j value) to this path");
  opc->add_option("-o,--output", op_cfg.output, "output path (default stdout)");

  CertifyConfig cert_cfg;
  auto* cert = app.add_subcommand("certify", "build and verify a finite net certificate");
  cert->add_option("--space", cert_cfg.space_path, "space document (JSON)")->required();
  cert->add_option("--r", cert_cfg.r, "averaging radius")->required();
  cert->add_option("--p", cert_cfg.p_text, "norm exponent in [1, inf], inf spelled \"inf\"")->required();
  cert->add_option("--epsilon", cert_cfg.epsilon, "target certificate radius")->required();
  cert->add_option("--family", cert_cfg.family_spec, "family file or sample:COUNT:SEED")->required();
  cert->add_option("--subset", cert_cfg.subset_spec, "all or ball:CENTER:RADIUS (default all)");
  cert->add_option("--grid", cert_cfg.grid, "delta grid resolution (default 64)");
  cert->add_flag("--full", cert_cfg.full, "include the full certificate in the report");
  cert->add_option("-o,--output", cert_cfg.output, "output path (default stdout)");

  CounterexampleConfig ce_cfg;
  auto* ce = app.add_subcommand("counterexample",
                                "separated witness family and its separation lower bound");
  ce->add_option("--space", ce_cfg.space_path, "space document (JSON; unused with --sweep)");
  ce->add_option("--s", ce_cfg.s, "witness scale (default 1)");
  ce->add_option("--mode", ce_cfg.mode_text, "l1 or linf (default l1)");
  ce->add_option("--sweep", ce_cfg.sweep, "grid lengths L1,L2,...; runs on unit grids over [0, L]")
      ->delimiter(',');
  ce->add_flag("--full", ce_cfg.full, "include the separation matrix");
  ce->add_flag("--csv", ce_cfg.csv, "emit the sweep as CSV");
  ce->add_option("-o,--output", ce_cfg.output, "output path (default stdout)");

  VerifyBoundsConfig vb_cfg;
  auto* vb = app.add_subcommand("verify-bounds",
                                "randomized inequality battery; exits 1 on any violation");
  vb->add_option("--space", vb_cfg.space_path, "space document (JSON)")->required();
  vb->add_option("--seed", vb_cfg.seed, "random seed (default 0)");
  vb->add_option("--trials", vb_cfg.trials, "number of randomized trials (default 1000)");
  vb->add_option("-o,--output", vb_cfg.output, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (diag->parsed()) return run_diagnose(diag_cfg);
    if (opc->parsed()) return run_operator(op_cfg);
    if (cert->parsed()) return run_certify(cert_cfg);
    if (ce->parsed()) return run_counterexample(ce_cfg);
    if (vb->parsed()) return run_verify_bounds(vb_cfg);
  } catch (const avgop::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
