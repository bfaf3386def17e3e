#include "smia/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "smia/audit.hpp"
#include "smia/error.hpp"
#include "smia/io.hpp"
#include "smia/synth.hpp"
#include "smia/theory.hpp"
#include "smia/transport.hpp"

namespace smia::cli {

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegeneratePopulations:
    case ErrorKind::DegenerateEmbeddings:
    case ErrorKind::TooManyFailedGroups:
    case ErrorKind::AllRowsRemoved:
    case ErrorKind::AllPointsIdentical:
    case ErrorKind::NumericalUnderflow:
      return kExitAuditFailure;
    default:
      return kExitUsage;
  }
}

FeatureMatrix load_named(const std::string& flag, const std::string& path) {
  try {
    return load_feature_matrix(path);
  } catch (const Error& e) {
    throw Error(e.kind(), flag + ": " + e.what());
  }
}

struct AuditFlags {
  std::string member, nonmember, audit, out;
  std::string method = "smia0";
  std::uint64_t k = 200;
  std::uint64_t seed = 42;
  bool entropy = false;
  std::string kernel = "rbf";
  std::optional<double> sigma;
  double poly_c = 1.0;
  int poly_p = 2;
  double rq_alpha = 1.0;
  std::optional<double> epsilon;
  int wp = 2;
  std::string mode = "ratio";
  double mean_weight = 1.0;
  bool no_filter = false;
  double z_threshold = kDefaultZThreshold;
  double resample_fraction = 1.0;
  unsigned threads = 1;
};

struct SynthFlags {
  double alpha = 0.3;
  Index n = 1000;
  Index d = 2;
  double sep = 3.0;
  std::uint64_t seed = 42;
  std::string outdir;
};

struct BoundsFlags {
  double risk = 0.0;
  double chi2 = 0.0;
  long long m = 1;
  double delta = 0.05;
  double dinf = 0.0;
};

struct TnrFlags {
  double accuracy = 0.99;
  double tpr = 0.9999;
  double p_min = 0.01;
  double p_max = 1.0;
  int p_steps = 100;
};

struct SinkhornFlags {
  std::string x, y;
  std::optional<double> epsilon;
  int wp = 2;
  int max_iters = 1000;
  double tol = 1e-6;
  bool linear_domain = false;
};

int cmd_audit(const AuditFlags& f, std::ostream& out) {
  AuditOptions opts;
  opts.method = parse_method(f.method);
  opts.bootstrap.k = f.k;
  opts.bootstrap.seed = f.entropy ? (std::uint64_t{std::random_device{}()} << 32) ^
                                        std::uint64_t{std::random_device{}()}
                                  : f.seed;
  opts.bootstrap.resample_fraction = f.resample_fraction;
  opts.bootstrap.threads = std::max(1u, f.threads);
  opts.smia0.mean_weight = f.mean_weight;
  opts.kernel.family = parse_kernel_family(f.kernel);
  opts.kernel.sigma = f.sigma;
  opts.kernel.c = f.poly_c;
  opts.kernel.p = f.poly_p;
  opts.kernel.alpha_rq = f.rq_alpha;
  opts.sinkhorn.epsilon = f.epsilon;
  opts.sinkhorn.p = f.wp;
  opts.mode = parse_wasserstein_mode(f.mode);
  opts.filter = !f.no_filter;
  opts.z_threshold = f.z_threshold;

  const auto x_t = load_named("--member", f.member);
  const auto x_v = load_named("--nonmember", f.nonmember);
  const auto x_f = load_named("--audit", f.audit);

  const auto report = run_audit(x_t, x_v, x_f, opts);
  try {
    write_report(report, f.out);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("--out: ") + e.what());
  }
  out << "method=" << to_string(report.method) << " alpha_p50=" << report.alpha_p50
      << " ci=[" << report.alpha_p5 << ", " << report.alpha_p95 << "] k=" << report.k_bootstrap
      << " seed=" << report.seed << "\n";
  return kExitOk;
}

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  const std::filesystem::path dir = f.outdir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoFailure, "--outdir: cannot create " + dir.string());

  const auto data = make_synthetic_audit({f.alpha, f.n, f.d, f.sep, f.seed});
  write_feature_matrix(data.member, dir / "member.csv");
  write_feature_matrix(data.nonmember, dir / "nonmember.csv");
  write_feature_matrix(data.audit.x_f, dir / "audit.csv");

  nlohmann::ordered_json truth;
  truth["alpha"] = f.alpha;
  truth["realized_alpha"] = double(data.audit.n_from_v) / double(f.n);
  truth["n"] = f.n;
  truth["n_from_t"] = data.audit.n_from_t;
  truth["n_from_v"] = data.audit.n_from_v;
  truth["d"] = f.d;
  truth["sep"] = f.sep;
  truth["seed"] = f.seed;
  write_text_file(dir / "truth.json", truth.dump(2) + "\n");
  out << "wrote " << dir.string() << " (n_from_t=" << data.audit.n_from_t
      << ", n_from_v=" << data.audit.n_from_v << ")\n";
  return kExitOk;
}

int cmd_bounds(const BoundsFlags& f, std::ostream& out) {
  const double stat = statistical_error_term(f.chi2, f.m, f.delta);
  const double total = auditing_bound({f.risk, f.chi2, f.m, f.delta, f.dinf});
  out << "statistical_error=" << format_double(stat) << "\n"
      << "risk_bound=" << format_double(f.risk + stat) << "\n"
      << "auditing_bound=" << format_double(total) << "\n";
  return kExitOk;
}

int cmd_tnr_curve(const TnrFlags& f, std::ostream& out) {
  if (f.p_steps < 1) fail(ErrorKind::InvalidRange, "--p-steps must be positive");
  if (!(f.p_min > 0.0 && f.p_min <= f.p_max && f.p_max <= 1.0)) {
    fail(ErrorKind::InvalidRange, "--p-min/--p-max must satisfy 0 < p-min <= p-max <= 1");
  }
  out << "p,tnr,feasible\n";
  for (int i = 0; i < f.p_steps; ++i) {
    const double p = f.p_steps == 1
                         ? f.p_min
                         : (f.p_min * double(f.p_steps - 1 - i) + f.p_max * double(i)) /
                               double(f.p_steps - 1);
    const auto point = tnr_curve(f.accuracy, f.tpr, p);
    out << format_double(p) << ',' << format_double(point.tnr) << ','
        << (point.feasible ? "true" : "false") << "\n";
  }
  return kExitOk;
}

int cmd_sinkhorn(const SinkhornFlags& f, std::ostream& out) {
  const auto x = load_named("--x", f.x);
  const auto y = load_named("--y", f.y);
  SinkhornConfig cfg;
  cfg.epsilon = f.epsilon;
  cfg.p = f.wp;
  cfg.max_iters = f.max_iters;
  cfg.tol = f.tol;
  cfg.log_domain = !f.linear_domain;
  const auto plan = sinkhorn_uniform(x, y, cfg);
  out << "w_eps=" << format_double(plan.w_eps) << "\n"
      << "entropy=" << format_double(plan.entropy) << "\n"
      << "epsilon=" << format_double(plan.epsilon) << "\n"
      << "median_cost=" << format_double(cost_scale(plan.cost)) << "\n"
      << "iterations=" << plan.iterations << "\n"
      << "max_marginal_violation=" << format_double(plan.max_marginal_violation) << "\n"
      << "converged=" << (plan.converged ? "true" : "false") << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistical unlearning audit: forgetting-rate estimation with bootstrap "
               "confidence intervals"};
  app.name("smia");
  app.require_subcommand(1, 1);

  AuditFlags audit;
  auto* a = app.add_subcommand("audit", "Estimate the forgetting rate of an audit set");
  a->add_option("--member", audit.member, "Member feature CSV")->required();
  a->add_option("--nonmember", audit.nonmember, "Non-member feature CSV")->required();
  a->add_option("--audit", audit.audit, "Pending-audit feature CSV")->required();
  a->add_option("--method", audit.method, "Estimator")
      ->check(CLI::IsMember({"smia0", "smia-m", "smia-w"}))
      ->capture_default_str();
  a->add_option("--k", audit.k, "Bootstrap groups")->check(CLI::PositiveNumber)->capture_default_str();
  a->add_option("--seed", audit.seed, "Master seed")->capture_default_str();
  a->add_flag("--entropy", audit.entropy, "Seed from the system entropy source instead");
  a->add_option("--out", audit.out, "Report JSON path")->required();
  a->add_option("--kernel", audit.kernel, "Kernel family")
      ->check(CLI::IsMember({"rbf", "laplacian", "poly", "rq"}))
      ->capture_default_str();
  a->add_option("--sigma", audit.sigma, "Kernel bandwidth (default: median heuristic)");
  a->add_option("--poly-c", audit.poly_c, "Polynomial kernel bias")->capture_default_str();
  a->add_option("--poly-p", audit.poly_p, "Polynomial kernel degree")->capture_default_str();
  a->add_option("--rq-alpha", audit.rq_alpha, "Rational quadratic tail parameter")
      ->capture_default_str();
  a->add_option("--epsilon", audit.epsilon, "Sinkhorn regularization (default 0.05 * median cost)");
  a->add_option("--wp", audit.wp, "Transport cost exponent")->capture_default_str();
  a->add_option("--mode", audit.mode, "Transport alpha mapping")
      ->check(CLI::IsMember({"ratio", "polarization"}))
      ->capture_default_str();
  a->add_option("--mean-weight", audit.mean_weight, "Weight of the mean residual")
      ->capture_default_str();
  a->add_flag("--no-filter", audit.no_filter, "Skip outlier exclusion");
  a->add_option("--z-threshold", audit.z_threshold, "Outlier z-score threshold")
      ->capture_default_str();
  a->add_option("--resample-fraction", audit.resample_fraction, "Bootstrap draw fraction")
      ->capture_default_str();
  a->add_option("--threads", audit.threads, "Worker threads")->capture_default_str();

  SynthFlags synth;
  auto* s = app.add_subcommand("synth", "Write synthetic member/non-member/audit fixtures");
  s->add_option("--alpha", synth.alpha, "True forgetting rate")->required();
  s->add_option("--n", synth.n, "Rows per set")->required()->check(CLI::PositiveNumber);
  s->add_option("--d", synth.d, "Feature dimension")->required()->check(CLI::PositiveNumber);
  s->add_option("--sep", synth.sep, "Mean separation per coordinate")->required();
  s->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  s->add_option("--outdir", synth.outdir, "Output directory")->required();

  BoundsFlags bounds;
  auto* b = app.add_subcommand("bounds", "Evaluate the statistical and auditing error bounds");
  b->add_option("--risk", bounds.risk, "Empirical risk")->capture_default_str();
  b->add_option("--chi2", bounds.chi2, "Chi-square divergence")->required();
  b->add_option("--m", bounds.m, "Sample count")->required();
  b->add_option("--delta", bounds.delta, "Confidence parameter")->required();
  b->add_option("--dinf", bounds.dinf, "Renyi-infinity divergence")->capture_default_str();

  TnrFlags tnr;
  auto* t = app.add_subcommand("tnr-curve", "TNR versus non-member proportion, as CSV");
  t->add_option("--accuracy", tnr.accuracy, "Attack accuracy")->required();
  t->add_option("--tpr", tnr.tpr, "Member detection rate")->required();
  t->add_option("--p-min", tnr.p_min, "Smallest non-member proportion")->capture_default_str();
  t->add_option("--p-max", tnr.p_max, "Largest non-member proportion")->capture_default_str();
  t->add_option("--p-steps", tnr.p_steps, "Grid points")->capture_default_str();

  SinkhornFlags sk;
  auto* k = app.add_subcommand("sinkhorn", "Entropic transport cost between two feature sets");
  k->add_option("--x", sk.x, "First feature CSV")->required();
  k->add_option("--y", sk.y, "Second feature CSV")->required();
  k->add_option("--epsilon", sk.epsilon, "Regularization (default 0.05 * median cost)");
  k->add_option("--wp", sk.wp, "Cost exponent")->capture_default_str();
  k->add_option("--max-iters", sk.max_iters, "Iteration cap")->capture_default_str();
  k->add_option("--tol", sk.tol, "Marginal tolerance")->capture_default_str();
  k->add_flag("--linear-domain", sk.linear_domain, "Scale in the linear domain");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (a->parsed()) return cmd_audit(audit, out);
    if (s->parsed()) return cmd_synth(synth, out);
    if (b->parsed()) return cmd_bounds(bounds, out);
    if (t->parsed()) return cmd_tnr_curve(tnr, out);
    if (k->parsed()) return cmd_sinkhorn(sk, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace smia::cli
