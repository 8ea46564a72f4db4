#include "cforge/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>

#include "cforge/commdecomp.hpp"
#include "cforge/cucompare.hpp"
#include "cforge/dhsdet.hpp"
#include "cforge/json_io.hpp"
#include "cforge/nildecomp.hpp"
#include "cforge/rng.hpp"

namespace cforge {

namespace {

struct Outcome {
  std::string report;
  bool bounds_ok = true;
  double reconstruction_residual = 0.0;
  int checks_passed = 0;
  int checks_failed = 0;
};

void tally(Outcome& out, const std::vector<BoundCheck>& checks) {
  for (const auto& c : checks) {
    if (c.pass)
      ++out.checks_passed;
    else
      ++out.checks_failed;
  }
  if (out.checks_failed > 0) out.bounds_ok = false;
}

Outcome run_decompose2(const RunConfig& cfg, const JsonDoc& in) {
  const MatC h = in.matrix("h");
  const int m = static_cast<int>(in.integer_or("m", 1));
  DecompCertificate cert = two_commutator(h, m, cfg.tol);
  Outcome out;
  out.report = certificate_report(cert);
  out.reconstruction_residual = cert.reconstruction_residual;
  tally(out, cert.bound_checks);
  return out;
}

Outcome run_peel(const RunConfig& cfg, const JsonDoc& in) {
  PeelResult r = hereditary_peel(in.matrix("a"), in.matrix("b"),
                                 static_cast<int>(in.integer("n")),
                                 in.matrix("h"), cfg.tol);
  Outcome out;
  out.report = peel_report(r);
  tally(out, r.checks);
  return out;
}

Outcome run_fack(const RunConfig& cfg, const JsonDoc& in) {
  const MatC h = in.matrix("h");
  FackTower tower = build_fack_tower(static_cast<int>(in.integer("ambient_dim")),
                                     in.int_list("ranks"),
                                     static_cast<int>(in.integer("L")));
  FackOptions opt;
  opt.tol = cfg.tol;
  FackResult r = fack_engine(h, tower,
                             make_matrix_stage_decomposer(opt.lambda, cfg.tol),
                             opt);
  Outcome out;
  out.report = fack_report(r);
  out.reconstruction_residual = r.cert.reconstruction_residual;
  tally(out, r.cert.bound_checks);
  return out;
}

Outcome run_nilify(const RunConfig& cfg, const JsonDoc& in) {
  const MatC z = in.matrix("z");
  NilCommutatorParts parts = nilpotent_as_commutator(z, cfg.tol);
  Outcome out;
  out.report = nil_parts_report(parts, z);
  const double scale = std::max(1.0, opnorm(z));
  std::vector<BoundCheck> checks;
  checks.push_back(check_bound("[u,v] = z", cfg.tol * scale * 100,
                               opnorm(z - commutator(parts.u, parts.v)),
                               cfg.tol));
  checks.push_back(check_bound(
      "[w*,w] = z + z*", cfg.tol * scale * 100,
      opnorm(MatC(z + z.adjoint()) - commutator(parts.w.adjoint(), parts.w)),
      cfg.tol));
  out.reconstruction_residual = checks[0].measured;
  tally(out, checks);
  return out;
}

Outcome run_bridge(const RunConfig& cfg, const JsonDoc& in) {
  const MatC a = in.matrix("a");
  const MatC b = in.matrix("b");
  Partition4 p = make_partition4(static_cast<int>(cfg.grid));
  ExpandReport rep = partition_expand(a, b, p, DelegateStrategy::Report, cfg.tol);
  Outcome out;
  out.report = nil_expand_report(rep, p, a, b);
  MatC total = MatC::Zero(a.rows(), a.cols());
  for (const auto& t : rep.terms) total += t.value;
  const double scale = std::max(1.0, opnorm(a) * opnorm(b));
  std::vector<BoundCheck> checks;
  checks.push_back(check_bound("term sum = [a,b]", 1e-12 * scale * 100,
                               opnorm(total - commutator(a, b)), cfg.tol));
  double worst = 0.0;
  for (const auto& t : rep.terms)
    for (const auto& piece : t.pieces) {
      const double np = opnorm(piece.value);
      if (np > kZeroFloor)
        worst = std::max(worst,
                         opnorm(MatC(piece.value * piece.value)) / (np * np));
    }
  checks.push_back(
      check_bound("pieces square-zero", cfg.tol * 100, worst, cfg.tol));
  out.reconstruction_residual = checks[0].measured;
  tally(out, checks);
  return out;
}

Outcome run_rosenblum(const RunConfig& cfg, const JsonDoc& in) {
  RosenblumProblem p;
  p.d_left = in.matrix("d_left");
  p.d_right = in.matrix("d_right");
  p.rhs = in.matrix("rhs");
  p.lambda_left = in.num("lambda_left");
  p.lambda_right = in.num("lambda_right");
  RosenblumResult r = rosenblum_solve(p, cfg.tol);
  const double residual =
      opnorm(p.d_left * r.b - r.b * p.d_right - p.rhs);
  Outcome out;
  out.report = rosenblum_report(r, residual);
  const double scale = std::max(1.0, opnorm(p.rhs));
  std::vector<BoundCheck> checks;
  checks.push_back(check_bound("sylvester residual", cfg.tol * scale * 100,
                               residual, cfg.tol));
  checks.push_back(check_bound(
      "resolvent norms <= 2", 2.0,
      std::max(r.max_resolvent_left, r.max_resolvent_right), cfg.tol));
  out.reconstruction_residual = residual;
  tally(out, checks);
  return out;
}

Outcome run_det(const RunConfig& cfg, const JsonDoc& in) {
  PathOfInvertibles p = in.path();
  DetReport rep = path_determinant(p, cfg.tol);
  Outcome out;
  out.report = det_report(rep);
  std::vector<BoundCheck> checks;
  if (p.closed) {
    const double dist =
        std::abs(rep.value.raw.real() - std::round(rep.value.raw.real()));
    checks.push_back(check_bound("closed loop winding is integral", 1e-9,
                                 dist, cfg.tol));
  }
  tally(out, checks);
  return out;
}

Outcome run_regroup(const RunConfig& cfg, const JsonDoc& in) {
  const int N = static_cast<int>(in.integer_or("N", cfg.N > 0 ? cfg.N : 2));
  RegroupResult r = regroup_commutators(in.matrix_list("factors"), N, cfg.tol);
  Outcome out;
  out.report = regroup_report(r);
  std::vector<BoundCheck> checks;
  checks.push_back(
      check_bound("regroup identity", 1e-10 * 100, r.residual, cfg.tol));
  out.reconstruction_residual = r.residual;
  tally(out, checks);
  return out;
}

Outcome run_suzuki(const RunConfig& cfg, const JsonDoc& in) {
  const int N = static_cast<int>(in.integer_or("N", cfg.N > 0 ? cfg.N : 16));
  auto a_list = in.matrix_list("a_list");
  auto [c, stats] = suzuki_defect(a_list, N, cfg.tol);
  Outcome out;
  out.report = suzuki_report(c, stats);
  double scale = 0.0;
  for (const auto& a : a_list) scale += opnorm(a);
  std::vector<BoundCheck> checks;
  checks.push_back(check_bound("Tr(c) = 0", 1e-10 * std::max(1.0, scale),
                               std::abs(stats.trace_c), cfg.tol));
  tally(out, checks);
  return out;
}

Outcome run_kernel(const RunConfig& cfg, const JsonDoc& in) {
  KernelResult r = kernel_membership(in.matrix("u"), cfg.tol);
  Outcome out;
  out.report = kernel_report(r);
  std::vector<BoundCheck> checks;
  if (r.certificate)
    checks.push_back(check_bound("commutator reconstruction", cfg.tol * 100,
                                 r.certificate->reconstruction_residual,
                                 cfg.tol));
  if (r.certificate)
    out.reconstruction_residual = r.certificate->reconstruction_residual;
  tally(out, checks);
  return out;
}

Outcome run_compare(const RunConfig& cfg, const JsonDoc& in) {
  JsonDoc shape_doc = in.object("shape");
  AlgebraShape shape;
  shape.blocks = shape_doc.int_list("blocks");
  shape.amplification = static_cast<int>(shape_doc.integer_or("amplification", 1));
  auto traces = in.trace_weights("traces");
  const MatC a = in.matrix("a");
  const MatC b = in.matrix("b");

  ComparisonVerdict verdict =
      strict_comparison_check(a, b, shape, cfg.gamma, traces);
  double delta = 0.0;
  bool delta_found = false;
  if (verdict.premise_holds) {
    auto d = epsilon_delta_witness(a, b, shape, cfg.gamma, cfg.eps, traces,
                                   cfg.tol);
    if (d) {
      delta = *d;
      delta_found = true;
    }
  }

  std::vector<CuntzVector> S;
  if (in.has("vectors")) S = in.cuntz_vectors("vectors");
  const long long cap = cfg.N > 0 ? cfg.N : 4;
  auto unperf = almost_unperforated_check(S, cap);
  auto div = almost_divisible_check(S, cap);

  Outcome out;
  out.report = compare_report(verdict, unperf, div, delta, delta_found);
  std::vector<BoundCheck> checks;
  // Strict comparison must imply rank domination; the witness search must
  // succeed whenever the premise holds.
  checks.push_back(check_bound(
      "premise implies conclusion", 0.0,
      verdict.premise_holds && !verdict.conclusion_holds ? 1.0 : 0.0, 0.0));
  checks.push_back(check_bound(
      "witness exists under premise", 0.0,
      verdict.premise_holds && !delta_found ? 1.0 : 0.0, 0.0));
  tally(out, checks);
  return out;
}

Outcome run_gen(const RunConfig& cfg, const JsonDoc& in) {
  const std::string kind = in.text("kind");
  Rng rng(cfg.seed);
  const int n = static_cast<int>(in.integer_or("n", cfg.n > 0 ? cfg.n : 4));
  Outcome out;
  if (kind == "trace_zero") {
    JsonBuilder b;
    b.begin_object();
    b.key("h").value(gen_trace_zero(rng, n));
    b.end_object();
    out.report = b.str();
  } else if (kind == "square_zero_pair") {
    auto [a, b] = gen_square_zero_pair(rng, n);
    out.report = matrix_pair_instance(a, b, "a", "b");
  } else if (kind == "unitary_path") {
    const int steps = static_cast<int>(in.integer_or("steps", cfg.grid));
    MatC h = gen_hermitian(rng, n);
    PathOfInvertibles p;
    const Complex i1(0.0, 1.0);
    for (int k = 0; k <= steps; ++k) {
      double t = static_cast<double>(k) / steps;
      p.samples.push_back({t, mexp(i1 * t * h)});
    }
    out.report = path_instance(p);
  } else if (kind == "fack_tower") {
    const int depth = static_cast<int>(in.integer_or("depth", 3));
    const int L = static_cast<int>(in.integer_or("L", 2));
    const int rank = static_cast<int>(in.integer_or("rank", 4));
    const int ambient = static_cast<int>(
        in.integer_or("ambient_dim", depth * rank));
    std::vector<int> ranks(depth, rank);
    FackTower tower = build_fack_tower(ambient, ranks, L);
    MatC h = MatC::Zero(ambient, ambient);
    MatC corner = gen_trace_zero(rng, rank);
    h.block(0, 0, rank, rank) = corner;
    JsonBuilder b;
    b.begin_object();
    b.key("ambient_dim").value(ambient);
    b.key("L").value(L);
    b.key("ranks").begin_array();
    for (int r : ranks) b.value(r);
    b.end_array();
    b.key("h").value(h);
    b.end_object();
    out.report = b.str();
  } else if (kind == "cu_instance") {
    std::vector<int> blocks = in.has("blocks") ? in.int_list("blocks")
                                               : std::vector<int>{3, 3};
    AlgebraShape shape{blocks, 1};
    std::vector<int> ra, rb;
    for (int bdim : blocks) {
      ra.push_back(static_cast<int>(rng.raw() % (bdim / 2 + 1)));
      rb.push_back(bdim / 2 + static_cast<int>(rng.raw() % (bdim - bdim / 2 + 1)));
    }
    MatC a = gen_psd_with_ranks(rng, shape, ra);
    MatC b0 = gen_psd_with_ranks(rng, shape, rb);
    JsonBuilder b;
    b.begin_object();
    b.key("shape").begin_object();
    b.key("blocks").begin_array();
    for (int v : blocks) b.value(v);
    b.end_array();
    b.key("amplification").value(1);
    b.end_object();
    b.key("a").value(a);
    b.key("b").value(b0);
    b.key("traces").begin_array();
    for (size_t i = 0; i < blocks.size(); ++i) {
      b.begin_array();
      for (size_t j = 0; j < blocks.size(); ++j) b.value(i == j ? 1.0 : 0.0);
      b.end_array();
    }
    b.begin_array();
    for (size_t j = 0; j < blocks.size(); ++j) b.value(1.0);
    b.end_array();
    b.end_array();
    b.end_object();
    out.report = b.str();
  } else {
    throw ValidationError("gen: unknown kind: " + kind);
  }
  return out;
}

std::string with_summary(const Outcome& out) {
  JsonBuilder b;
  b.begin_object();
  b.key("reconstruction_residual").value(out.reconstruction_residual);
  b.key("bound_checks_passed").value(out.checks_passed);
  b.key("bound_checks_failed").value(out.checks_failed);
  b.end_object();
  return "{\"report\":" + out.report + ",\"summary\":" + b.str() + "}\n";
}

Outcome dispatch(const RunConfig& cfg);

int run_one(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = dispatch(cfg);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  // Generated instances are inputs for other commands: no report envelope.
  const std::string doc =
      cfg.command == "gen" ? out.report + "\n" : with_summary(out);
  if (!cfg.output_path.empty())
    write_file(cfg.output_path, doc);
  else
    std::cout << doc;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  // Timing goes to stdout only so report files stay byte-deterministic.
  std::cout << "wall_time_seconds: " << secs << "\n";
  if (!out.bounds_ok && !cfg.report_only) return kExitBoundViolation;
  return kExitOk;
}

Outcome dispatch(const RunConfig& cfg) {
  const bool needs_input = cfg.command != "gen" || !cfg.input_path.empty();
  JsonDoc in(needs_input && !cfg.input_path.empty()
                 ? read_file(cfg.input_path)
                 : std::string("{}"));
  if (cfg.command == "decompose2") return run_decompose2(cfg, in);
  if (cfg.command == "peel") return run_peel(cfg, in);
  if (cfg.command == "fack") return run_fack(cfg, in);
  if (cfg.command == "nilify") return run_nilify(cfg, in);
  if (cfg.command == "bridge") return run_bridge(cfg, in);
  if (cfg.command == "rosenblum") return run_rosenblum(cfg, in);
  if (cfg.command == "det") return run_det(cfg, in);
  if (cfg.command == "regroup") return run_regroup(cfg, in);
  if (cfg.command == "suzuki") return run_suzuki(cfg, in);
  if (cfg.command == "kernel") return run_kernel(cfg, in);
  if (cfg.command == "compare") return run_compare(cfg, in);
  if (cfg.command == "gen") return run_gen(cfg, in);
  throw ValidationError("unknown command: " + cfg.command);
}

}  // namespace

void RunConfig::validate() const {
  if (!(tol > 0.0 && tol < 1e-2))
    throw ValidationError("RunConfig: tol must lie in (0, 1e-2)");
  if (jobs < 1) throw ValidationError("RunConfig: jobs must be >= 1");
}

int run(const RunConfig& config) {
  RunConfig cfg = config;
  if (const char* env = std::getenv("CFORGE_TOL"); env && cfg.tol == kDefaultTol)
    cfg.tol = std::atof(env);
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }

  // Manifest fan-out: an input file with a "jobs" array runs each entry.
  if (cfg.command == "manifest") {
    int worst = kExitOk;
    try {
      JsonDoc doc(read_file(cfg.input_path));
      const size_t count = doc.array_size("jobs");
      for (size_t i = 0; i < count; ++i) {
        JsonDoc job = doc.element("jobs", i);
        RunConfig sub = cfg;
        sub.command = job.text("cmd");
        sub.input_path = job.has("in") ? job.text("in") : "";
        sub.output_path = job.has("out") ? job.text("out") : "";
        sub.tol = job.num_or("tol", cfg.tol);
        sub.seed = static_cast<std::uint64_t>(job.integer_or("seed", 0));
        sub.n = job.integer_or("n", cfg.n);
        sub.N = job.integer_or("N", cfg.N);
        sub.grid = job.integer_or("grid", cfg.grid);
        worst = std::max(worst, run_one(sub));
      }
    } catch (const ValidationError& e) {
      std::cerr << "validation error: " << e.what() << "\n";
      return kExitValidation;
    }
    return worst;
  }

  return run_one(cfg);
}

}  // namespace cforge
