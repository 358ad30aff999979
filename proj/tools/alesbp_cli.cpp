// Command-line driver: convergence tables, stability audits, free-stream
// checks, SBP operator reports and the 2D curvilinear free-stream report.

#include "alesbp/config.hpp"
#include "alesbp/curvilinear2d.hpp"
#include "alesbp/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace alesbp;

namespace {

struct Flags {
  std::string config;
  std::string mesh_case;
  std::string N;
  std::vector<std::string> orders;
  double epsilon = 0.0;
  std::string jacobian_mode;
  std::string filter;
  std::string out;
  int samples = 0;
};

// Writes to --out when given, otherwise to stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidArgument("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ExperimentConfig resolve(const Flags& fl, const CLI::App& app) {
  ExperimentConfig cfg;
  if (!fl.config.empty()) cfg = load_config(fl.config, cfg);
  if (app.count("--case")) cfg.mesh_case = parse_case(fl.mesh_case);
  if (app.count("--N")) cfg.N = parse_int_list(fl.N);
  if (app.count("--orders")) {
    if (fl.orders.size() != 1) throw InvalidArgument("this subcommand takes a single --orders value");
    cfg.order = parse_order(fl.orders.front());
  }
  if (app.count("--epsilon")) cfg.epsilon = fl.epsilon;
  if (app.count("--jacobian-mode")) cfg.jacobian_mode = parse_jacobian_mode(fl.jacobian_mode);
  if (app.count("--filter")) apply_setting(cfg, "filter", fl.filter);
  if (app.count("--out")) cfg.out = fl.out;
  if (app.count("--samples")) cfg.samples = fl.samples;
  cfg.validate();
  return cfg;
}

int cmd_converge(const ExperimentConfig& cfg) {
  const auto rows = run_convergence(cfg);
  std::ostringstream csv;
  write_convergence_csv(csv, rows);
  std::cout << csv.str();
  if (!cfg.out.empty()) Output(cfg.out).stream() << csv.str();
  return 0;
}

int cmd_audit(const ExperimentConfig& cfg) {
  const auto reports = audit_sweep(cfg, cfg.N.front());
  Output out(cfg.out);
  auto& os = out.stream();
  os << "t,lambda_max_energy,lambda_max_ref,inertia_match,pass\n";
  bool all = true;
  for (const auto& r : reports) {
    const bool ok = r.pass && r.inertia_match();
    all = all && ok;
    os << fmt("%.6f", r.t) << ',' << fmt("%.6e", r.lambda_max_energy) << ',' << fmt("%.6e", r.lambda_max_ref)
       << ',' << (r.inertia_match() ? "yes" : "no") << ',' << (ok ? "PASS" : "FAIL") << '\n';
  }
  std::cerr << (all ? "PASS" : "FAIL") << ": " << reports.size() << " audit samples\n";
  return all ? 0 : 1;
}

int cmd_freestream(const ExperimentConfig& cfg, const std::vector<double>& u_inf, bool filter_given) {
  Output out(cfg.out);
  auto& os = out.stream();
  os << "u_inf,filter,max_deviation,pass\n";
  std::vector<bool> modes = filter_given ? std::vector<bool>{cfg.filter.enabled} : std::vector<bool>{false, true};
  bool all = true;
  for (double u : u_inf)
    for (bool f : modes) {
      const auto r = run_freestream(cfg, cfg.N.front(), u, f);
      const bool ok = r.max_deviation <= 1e-12;
      all = all && ok;
      os << u << ',' << (f ? "on" : "off") << ',' << fmt("%.3e", r.max_deviation) << ',' << (ok ? "PASS" : "FAIL")
         << '\n';
    }
  std::cerr << (all ? "PASS" : "FAIL") << '\n';
  return all ? 0 : 1;
}

void dump_matrix(const std::filesystem::path& file, const Mat& m) {
  std::ofstream os(file);
  os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    os << '\n';
  }
}

int cmd_ops(const Flags& fl, const CLI::App& app, const std::string& dump) {
  std::vector<SbpOrder> orders{SbpOrder::Order21, SbpOrder::Order42};
  if (app.count("--orders")) {
    orders.clear();
    for (const auto& o : fl.orders) orders.push_back(parse_order(o));
  }
  const std::vector<int> ns = app.count("--N") ? parse_int_list(fl.N) : std::vector<int>{16};
  Output out(fl.out);
  auto& os = out.stream();
  os << "operator,order,n,residual,pass\n";
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  bool all = true;
  const auto row = [&](const char* name, SbpOrder o, int n, double res, double tol) {
    const bool ok = res <= tol;
    all = all && ok;
    os << name << ',' << to_string(o) << ',' << n << ',' << fmt("%.3e", res) << ',' << (ok ? "PASS" : "FAIL") << '\n';
  };
  for (SbpOrder o : orders)
    for (int n : ns) {
      const auto single = build_operator(o, std::max(n, min_nodes(o)), 0.1);
      row("single", o, single.n, sbp_residual(single), 1e-13);
      const auto layout = layout_for_ratio(std::max(n, min_nodes(o)));
      const auto left = build_operator(o, layout.left_nodes(), layout.left_spacing0(), layout.xs0);
      const auto right = build_operator(o, layout.right_nodes(), layout.right_spacing0(), left.x_end());
      const auto two = couple_blocks(left, right);
      row("two_block", o, two.n, sbp_residual(two), 1e-13);
      Vec xdot(two.n);
      for (auto& v : xdot) v = uni(rng);
      const double r = reynolds_identity_residual(build_dm(two.D, xdot), two.P,
                                                  surface_1d(two.n, xdot[0], xdot[two.n - 1]));
      row("mesh_motion", o, two.n, r, 1e-12 * two.P.maxCoeff());
      if (!dump.empty()) {
        const std::filesystem::path dir(dump);
        std::filesystem::create_directories(dir);
        const std::string tag = (o == SbpOrder::Order21 ? "21_n" : "42_n") + std::to_string(single.n);
        dump_matrix(dir / ("P_" + tag + ".csv"), Mat(single.P.asDiagonal()));
        dump_matrix(dir / ("Q_" + tag + ".csv"), Mat(single.Q));
        dump_matrix(dir / ("D_" + tag + ".csv"), Mat(single.D));
      }
    }
  std::cerr << (all ? "PASS" : "FAIL") << '\n';
  return all ? 0 : 1;
}

int cmd_curvilinear(const Flags& fl, const CLI::App& app, int n) {
  SbpOrder order = SbpOrder::Order42;
  if (app.count("--orders")) order = parse_order(fl.orders.front());
  const auto ops = make_tensor_ops(order, n);
  Output out(fl.out);
  auto& os = out.stream();
  os << "mapping,mode,discrepancy,fsp_deviation\n";
  bool all = true;
  for (const auto& m : mappings::registry())
    for (const auto& r : fsp_mode_check(ops, m)) {
      if (r.mode == "gcl-ode") all = all && r.fsp_deviation <= 1e-12;
      os << r.mapping << ',' << r.mode << ',' << fmt("%.3e", r.discrepancy) << ',' << fmt("%.3e", r.fsp_deviation)
         << '\n';
    }
  std::cerr << (all ? "PASS" : "FAIL") << ": GCL-ODE free stream\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-stable ALE summation-by-parts experiments"};
  app.failure_message(CLI::FailureMessage::help);
  app.require_subcommand(1);

  Flags fl;
  app.add_option("--config", fl.config, "key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("--case", fl.mesh_case, "stationary or moving")->check(CLI::IsMember({"stationary", "moving"}));
  app.add_option("--N", fl.N, "comma-separated boundary-layer spacings, e.g. 8,16,32");
  app.add_option("--orders", fl.orders, "SBP order pair(s): 2,1 or 4,2")->delimiter(';');
  app.add_option("--epsilon", fl.epsilon, "diffusion coefficient");
  app.add_option("--jacobian-mode", fl.jacobian_mode, "exact or coupled")->check(CLI::IsMember({"exact", "coupled"}));
  app.add_option("--filter", fl.filter, "post-step filter on/off");
  app.add_option("--out", fl.out, "CSV output path");
  app.add_option("--samples", fl.samples, "audit sample count");

  auto* converge = app.add_subcommand("converge", "manufactured-solution convergence table");
  auto* audit_cmd = app.add_subcommand("audit", "energy-matrix audit over one period");
  auto* freestream = app.add_subcommand("freestream", "free-stream preservation check");
  std::vector<double> u_inf{1.0, -3.7};
  freestream->add_option("--u-inf", u_inf, "free-stream values")->delimiter(',');
  auto* ops = app.add_subcommand("ops", "SBP residual report");
  std::string dump;
  ops->add_option("--dump", dump, "directory for P, Q, D CSV dumps");
  auto* curvilinear = app.add_subcommand("curvilinear", "2D metric consistency and free-stream report");
  int n2d = 17;
  curvilinear->add_option("--n", n2d, "nodes per direction")->check(CLI::Range(8, 257));
  for (auto* s : {converge, audit_cmd, freestream, ops, curvilinear}) s->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ops) return cmd_ops(fl, app, dump);
    if (*curvilinear) return cmd_curvilinear(fl, app, n2d);
    const ExperimentConfig cfg = resolve(fl, app);
    if (*converge) return cmd_converge(cfg);
    if (*audit_cmd) return cmd_audit(cfg);
    if (*freestream) return cmd_freestream(cfg, u_inf, app.count("--filter") > 0);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
