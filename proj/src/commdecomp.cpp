#include "cforge/commdecomp.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace cforge {

bool DecompCertificate::all_bounds_pass() const {
  for (const auto& c : bound_checks)
    if (!c.pass) return false;
  return true;
}

double DecompCertificate::sum_factor_products() const {
  double s = 0.0;
  for (const auto& [nx, ny] : factor_norms) s += nx * ny;
  return s;
}

DecompCertificate make_certificate(MatC target,
                                   std::vector<std::pair<MatC, MatC>> pairs,
                                   MatC residual,
                                   std::vector<BoundCheck> checks) {
  DecompCertificate cert;
  cert.target = std::move(target);
  cert.pairs = std::move(pairs);
  cert.residual = std::move(residual);
  cert.bound_checks = std::move(checks);
  MatC rec = cert.target - cert.residual;
  for (const auto& [x, y] : cert.pairs) {
    cert.factor_norms.emplace_back(opnorm(x), opnorm(y));
    rec -= commutator(x, y);
  }
  cert.reconstruction_residual = opnorm(rec);
  return cert;
}

BoundCheck check_bound(const std::string& name, double claimed, double measured,
                       double tol) {
  BoundCheck c;
  c.name = name;
  c.claimed = claimed;
  c.measured = measured;
  c.pass = measured <= claimed * (1.0 + 1e-8) + tol;
  return c;
}

std::pair<MatC, MatC> split_norm_factor(const MatC& s) {
  require_finite(s, "split_norm_factor");
  require_square(s, "split_norm_factor");
  const Eigen::Index n = s.rows();
  if (opnorm(s) <= kZeroFloor)
    return {MatC::Zero(n, n), MatC::Zero(n, n)};
  PolarParts vp = polar(s);
  MatC root = func_psd(vp.p, [](double t) { return std::sqrt(t); });
  return {vp.v * root, root};
}

std::pair<MatC, MatC> diagonal_commutator(const std::vector<MatC>& d,
                                          double tol) {
  if (d.empty()) throw ValidationError("diagonal_commutator: empty input");
  const Eigen::Index m = d[0].rows();
  double dmax = 0.0;
  MatC sum = MatC::Zero(m, m);
  for (const auto& di : d) {
    require_finite(di, "diagonal_commutator");
    if (di.rows() != m || di.cols() != m)
      throw ValidationError("diagonal_commutator: inconsistent block sizes");
    dmax = std::max(dmax, opnorm(di));
    sum += di;
  }
  if (opnorm(sum) > tol * std::max(1.0, dmax) * 10)
    throw ValidationError("diagonal_commutator: blocks do not sum to zero");

  const int n = static_cast<int>(d.size());
  MatC X = MatC::Zero(n * m, n * m);
  MatC Y = MatC::Zero(n * m, n * m);
  MatC s = MatC::Zero(m, m);
  for (int k = 0; k + 1 < n; ++k) {
    s += d[k];  // s_k = d_1 + ... + d_k
    auto [q, r] = split_norm_factor(s);
    // X: q_k at (k-1, k), r_k at (k, k); Y: r_k at (k, k-1), q_k at (k, k).
    set_block(X, static_cast<int>(m), k, k + 1, q);
    set_block(X, static_cast<int>(m), k + 1, k + 1, r);
    set_block(Y, static_cast<int>(m), k + 1, k, r);
    set_block(Y, static_cast<int>(m), k + 1, k + 1, q);
  }
  return {X, Y};
}

RosenblumResult rosenblum_solve(const RosenblumProblem& p, double tol) {
  require_finite(p.rhs, "rosenblum_solve rhs");
  const Eigen::Index m = p.rhs.rows();
  if (p.d_left.rows() != m || p.d_right.rows() != m)
    throw ValidationError("rosenblum_solve: dimension mismatch");
  if (p.lambda_left == p.lambda_right)
    throw ValidationError("rosenblum_solve: coincident shift centers");
  const MatC id = MatC::Identity(m, m);
  if (opnorm(p.d_left - p.lambda_left * id) > 1.0 + 1e-8 ||
      opnorm(p.d_right - p.lambda_right * id) > 1.0 + 1e-8)
    throw ValidationError("rosenblum_solve: contraction precondition violated");

  RosenblumResult out;
  out.b = MatC::Zero(m, m);
  const double nrhs = opnorm(p.rhs);
  if (nrhs <= kZeroFloor) {
    out.nodes = 0;
    return out;
  }

  auto integrate = [&](int nodes, double* rl, double* rr) {
    MatC acc = MatC::Zero(m, m);
    for (int j = 0; j < nodes; ++j) {
      const double t = 2.0 * M_PI * j / nodes;
      const Complex phase(std::cos(t), std::sin(t));
      const Complex alpha = p.lambda_left + p.radius * phase;
      MatC resl = (p.d_left - alpha * id).inverse();
      MatC resr = (p.d_right - alpha * id).inverse();
      if (rl) *rl = std::max(*rl, opnorm(resl));
      if (rr) *rr = std::max(*rr, opnorm(resr));
      acc += phase * (resl * p.rhs * resr);
    }
    return MatC((p.radius / nodes) * acc);
  };

  MatC prev = integrate(p.start_nodes, nullptr, nullptr);
  for (int nodes = 2 * p.start_nodes; nodes <= p.node_cap; nodes *= 2) {
    double rl = 0.0, rr = 0.0;
    MatC cur = integrate(nodes, &rl, &rr);
    if (opnorm(cur - prev) < tol * nrhs) {
      out.b = cur;
      out.max_resolvent_left = rl;
      out.max_resolvent_right = rr;
      out.nodes = nodes;
      return out;
    }
    prev = cur;
  }
  throw NumericalError("rosenblum_solve: quadrature did not converge at cap");
}

ZeroDiagResult zero_diagonal_commutator(
    const MatC& h, int m,
    const std::vector<std::pair<MatC, MatC>>& diag_witnesses, double tol) {
  require_finite(h, "zero_diagonal_commutator");
  require_square(h, "zero_diagonal_commutator");
  if (m <= 0 || h.rows() % m != 0)
    throw ValidationError("zero_diagonal_commutator: bad block size");
  const int n = static_cast<int>(h.rows()) / m;
  if (static_cast<int>(diag_witnesses.size()) != n)
    throw ValidationError("zero_diagonal_commutator: need one witness per block");
  const double nh = opnorm(h);
  const double scale = std::max(1.0, nh);
  for (int j = 0; j < n; ++j) {
    const auto& [x, y] = diag_witnesses[j];
    if (opnorm(block_of(h, m, j, j) - commutator(x, y)) > tol * scale * 100)
      throw ValidationError("zero_diagonal_commutator: diagonal witness mismatch");
  }

  // Contraction-normalize the witnesses, absorbing ||x_j|| into y_j.
  std::vector<MatC> xs(n), ys(n);
  for (int j = 0; j < n; ++j) {
    const auto& [x, y] = diag_witnesses[j];
    const double nx = opnorm(x);
    if (nx <= kZeroFloor) {
      xs[j] = MatC::Zero(m, m);
      ys[j] = MatC::Zero(m, m);
    } else {
      xs[j] = x / nx;
      ys[j] = nx * y;
    }
  }

  const MatC id = MatC::Identity(m, m);
  ZeroDiagResult out;
  out.X = MatC::Zero(n * m, n * m);
  out.Y = MatC::Zero(n * m, n * m);
  for (int j = 0; j < n; ++j) {
    set_block(out.X, m, j, j, MatC(xs[j] + 3.0 * j * id));
    set_block(out.Y, m, j, j, ys[j]);
  }
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      if (k == j) continue;
      RosenblumProblem p;
      p.d_left = block_of(out.X, m, k, k);
      p.d_right = block_of(out.X, m, j, j);
      p.rhs = block_of(h, m, k, j);
      p.lambda_left = 3.0 * k;
      p.lambda_right = 3.0 * j;
      RosenblumResult r = rosenblum_solve(p, tol);
      set_block(out.Y, m, k, j, r.b);
      out.max_entry_norm = std::max(out.max_entry_norm, opnorm(r.b));
      out.max_resolvent = std::max(
          out.max_resolvent, std::max(r.max_resolvent_left, r.max_resolvent_right));
    }
  }

  out.checks.push_back(check_bound("zero_diagonal ||X|| <= 3n", 3.0 * n,
                                   opnorm(out.X), tol));
  out.checks.push_back(check_bound("rosenblum entries <= 12||h||", 12.0 * nh,
                                   out.max_entry_norm, tol));
  out.checks.push_back(
      check_bound("resolvent norms <= 2", 2.0, out.max_resolvent, tol));
  out.checks.push_back(check_bound("[X,Y] = h", tol * scale,
                                   opnorm(commutator(out.X, out.Y) - h), tol));
  return out;
}

static std::vector<std::pair<MatC, MatC>> scalar_base_decomposer(const MatC& s,
                                                                 double tol) {
  if (opnorm(s) > tol * 100)
    throw ValidationError("two_commutator: scalar base element is not trace-zero");
  return {};  // the only trace-zero scalar is 0: the empty sum
}

DecompCertificate two_commutator(const MatC& h, int m, double tol,
                                 const BaseDecomposer& base) {
  require_finite(h, "two_commutator");
  require_square(h, "two_commutator");
  if (m <= 0 || h.rows() % m != 0)
    throw ValidationError("two_commutator: bad base block size");
  const int n = static_cast<int>(h.rows()) / m;
  const double nh = opnorm(h);
  const Eigen::Index dim = h.rows();
  if (std::abs(h.trace()) > tol * std::max(1.0, nh) * dim * 10)
    throw ValidationError("two_commutator: input has nonzero trace");

  if (nh <= kZeroFloor) {
    MatC z = MatC::Zero(dim, dim);
    return make_certificate(h, {{z, z}, {z, z}}, z,
                            {check_bound("reconstruction", tol, 0.0, tol)});
  }

  // Decompose the block-diagonal sum in the base algebra.
  MatC s = MatC::Zero(m, m);
  for (int j = 0; j < n; ++j) s += block_of(h, m, j, j);
  std::vector<std::pair<MatC, MatC>> base_pairs;
  if (base) {
    base_pairs = base(s);
  } else if (m == 1) {
    base_pairs = scalar_base_decomposer(s, tol);
  } else {
    DecompCertificate inner = two_commutator(s, 1, tol);
    base_pairs = inner.pairs;
  }
  const int count = static_cast<int>(base_pairs.size());
  if (n < std::max(2, count))
    throw ValidationError("two_commutator: n too small for base commutator count");

  std::vector<MatC> d(n);
  for (int j = 0; j < n; ++j) {
    d[j] = block_of(h, m, j, j);
    if (j < count)
      d[j] -= commutator(base_pairs[j].first, base_pairs[j].second);
  }
  double dmax = 0.0;
  for (const auto& dj : d) dmax = std::max(dmax, opnorm(dj));

  auto [X1, Y1] = diagonal_commutator(d, tol);
  MatC h2 = h - commutator(X1, Y1);

  std::vector<std::pair<MatC, MatC>> witnesses(
      n, {MatC::Zero(m, m), MatC::Zero(m, m)});
  for (int j = 0; j < count; ++j) witnesses[j] = base_pairs[j];
  ZeroDiagResult zd = zero_diagonal_commutator(h2, m, witnesses, tol);

  std::vector<BoundCheck> checks;
  checks.push_back(check_bound("diagonal_commutator ||X1||||Y1|| <= 4n max||d||",
                               4.0 * n * dmax, opnorm(X1) * opnorm(Y1), tol));
  for (auto& c : zd.checks) checks.push_back(std::move(c));
  DecompCertificate cert =
      make_certificate(h, {{X1, Y1}, {zd.X, zd.Y}}, MatC::Zero(dim, dim),
                       std::move(checks));
  cert.bound_checks.push_back(check_bound("reconstruction",
                                          tol * std::max(1.0, nh) * 100,
                                          cert.reconstruction_residual, tol));
  return cert;
}

DecompCertificate matrix_average_reduce(const DecompCertificate& cert, int n) {
  if (n <= 0) throw ValidationError("matrix_average_reduce: bad n");
  const Eigen::Index dim = cert.target.rows();
  if (dim % n != 0)
    throw ValidationError("matrix_average_reduce: shape mismatch");
  const int m = static_cast<int>(dim) / n;

  // Recover h from h (x) 1_n as the average of the diagonal blocks.
  MatC h = MatC::Zero(m, m);
  for (int k = 0; k < n; ++k) h += block_of(cert.target, m, k, k);
  h /= n;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      MatC want = (k == l) ? h : MatC::Zero(m, m);
      if (opnorm(MatC(block_of(cert.target, m, k, l) - want)) >
          1e-8 * std::max(1.0, opnorm(h)))
        throw ValidationError(
            "matrix_average_reduce: target is not of the form h (x) 1_n");
    }

  std::vector<std::pair<MatC, MatC>> pairs;
  double in_sum = 0.0;
  for (const auto& [X, Y] : cert.pairs) {
    in_sum += opnorm(X) * opnorm(Y);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        pairs.emplace_back(MatC(block_of(X, m, k, l) / n),
                           block_of(Y, m, l, k));
  }
  MatC res = MatC::Zero(m, m);
  for (int k = 0; k < n; ++k) res += block_of(cert.residual, m, k, k);
  res /= n;

  std::vector<BoundCheck> checks;
  checks.push_back(check_bound("averaged sum ||x||||y|| <= n sum ||X||||Y||",
                               n * in_sum, 0.0 /*filled below*/));
  DecompCertificate out = make_certificate(h, std::move(pairs), res, checks);
  out.bound_checks[0].measured = out.sum_factor_products();
  out.bound_checks[0].pass =
      out.bound_checks[0].measured <= out.bound_checks[0].claimed * (1 + 1e-8) + 1e-10;
  out.bound_checks.push_back(
      check_bound("averaged reconstruction <= n * input residual",
                  n * cert.reconstruction_residual + 1e-12,
                  out.reconstruction_residual));
  return out;
}

std::optional<MatC> blackadar_witness(const MatC& a, const MatC& b, int n) {
  require_finite(a, "blackadar_witness");
  require_finite(b, "blackadar_witness");
  require_square(a, "blackadar_witness");
  if (a.rows() != b.rows())
    throw ValidationError("blackadar_witness: dimension mismatch");
  if (n <= 0) throw ValidationError("blackadar_witness: bad n");
  const int d = static_cast<int>(a.rows());

  Eigen::SelfAdjointEigenSolver<MatC> ea((a + a.adjoint()) / 2.0);
  Eigen::SelfAdjointEigenSolver<MatC> eb((b + b.adjoint()) / 2.0);
  const double ta = ea.eigenvalues().size()
                        ? ea.eigenvalues().cwiseAbs().maxCoeff() * kRankRelThreshold
                        : 0.0;
  const double tb = eb.eigenvalues().size()
                        ? eb.eigenvalues().cwiseAbs().maxCoeff() * kRankRelThreshold
                        : 0.0;

  std::vector<int> ia, ib;
  for (int i = 0; i < d; ++i) {
    if (ea.eigenvalues()(i) > ta) ia.push_back(i);
    if (eb.eigenvalues()(i) > tb) ib.push_back(i);
  }
  const int ra = static_cast<int>(ia.size());
  const int rb = static_cast<int>(ib.size());
  if (ra > n * rb) return std::nullopt;

  // x = sum_i sqrt(alpha_i) xi_i (e_0 (x) u_i)^*, with xi_i running through an
  // orthonormal family inside the support of b (x) 1_n.
  MatC x = MatC::Zero(n * d, n * d);
  for (int i = 0; i < ra; ++i) {
    const double alpha = ea.eigenvalues()(ia[i]);
    const int t = i / rb;       // amplification copy
    const int s = i % rb;       // support vector of b
    Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(n * d);
    xi.segment(t * d, d) = eb.eigenvectors().col(ib[s]);
    Eigen::VectorXcd ui = Eigen::VectorXcd::Zero(n * d);
    ui.segment(0, d) = ea.eigenvectors().col(ia[i]);
    x += std::sqrt(alpha) * xi * ui.adjoint();
  }
  return x;
}

PeelResult hereditary_peel(const MatC& a, const MatC& b, int n, const MatC& h,
                           double tol, const std::optional<MatC>& witness) {
  require_finite(h, "hereditary_peel");
  const int d = static_cast<int>(a.rows());
  if (h.rows() != d || b.rows() != d)
    throw ValidationError("hereditary_peel: dimension mismatch");
  const double nh = opnorm(h);
  if (nh > kZeroFloor && !in_her(a, h, 1e-8))
    throw ValidationError("hereditary_peel: h is not in her(a)");

  std::optional<MatC> x = witness;
  if (!x) x = blackadar_witness(a, b, n);
  if (!x)
    throw ValidationError("hereditary_peel: NotComparable (rank(a) > n rank(b))");

  PeelResult out;
  if (nh <= kZeroFloor) {
    out.pairs.assign(n, {MatC::Zero(d, d), MatC::Zero(d, d)});
    out.h_tail = MatC::Zero(d, d);
    out.checks.push_back(check_bound("peel reconstruction", tol, 0.0, tol));
    return out;
  }

  PolarParts vp = polar(*x);
  auto [h1, h2] = split_norm_factor(h);
  MatC rec = h;
  out.h_tail = MatC::Zero(d, d);
  double max_prod = 0.0;
  for (int j = 0; j < n; ++j) {
    MatC vj = vp.v.block(j * d, 0, d, d);
    MatC z = h1 * vj.adjoint();
    MatC w = vj * h2;
    out.pairs.emplace_back(z, w);
    out.h_tail += vj * h2 * h1 * vj.adjoint();
    rec -= commutator(z, w);
    max_prod = std::max(max_prod, opnorm(z) * opnorm(w));
  }
  rec -= out.h_tail;

  out.checks.push_back(
      check_bound("||z_j|| ||w_j|| <= ||h||", nh, max_prod, tol));
  out.checks.push_back(
      check_bound("||h_tail|| <= n ||h||", n * nh, opnorm(out.h_tail), tol));
  out.checks.push_back(check_bound("peel reconstruction",
                                   tol * std::max(1.0, nh) * 100, opnorm(rec),
                                   tol));
  out.checks.push_back(check_bound(
      "h_tail in her(b)", tol * 100,
      opnorm(out.h_tail - her_compress(b, out.h_tail)) / std::max(1.0, nh),
      tol));
  return out;
}

void FackTower::validate(double tol) const {
  if (blocks.empty()) throw ValidationError("FackTower: no blocks");
  if (L <= 0) throw ValidationError("FackTower: bad L");
  for (size_t i = 0; i < blocks.size(); ++i)
    for (size_t j = i + 1; j < blocks.size(); ++j)
      if (opnorm(MatC(blocks[i] * blocks[j])) >
          tol * std::max(1.0, opnorm(blocks[i]) * opnorm(blocks[j])) * 100)
        throw ValidationError("FackTower: blocks are not pairwise orthogonal");
  if (witnesses.size() + 1 != blocks.size())
    throw ValidationError("FackTower: need one witness per adjacent pair");
  for (size_t j = 0; j + 1 < blocks.size(); ++j) {
    const MatC& x = witnesses[j];
    const int d = ambient_dim;
    MatC xstarx = (x.adjoint() * x).block(0, 0, d, d);
    if (opnorm(MatC(xstarx - blocks[j])) > 1e-8 * std::max(1.0, opnorm(blocks[j])))
      throw ValidationError("FackTower: witness x*x != e_j");
    MatC amp = amplify(blocks[j + 1], L);
    if (!in_her(amp, MatC(x * x.adjoint()), 1e-8))
      throw ValidationError("FackTower: witness xx* not in her(e_{j+1} (x) 1_L)");
  }
}

FackTower build_fack_tower(int ambient_dim, const std::vector<int>& ranks,
                           int L) {
  if (ranks.empty()) throw ValidationError("build_fack_tower: no ranks");
  int total = 0;
  for (size_t j = 0; j < ranks.size(); ++j) {
    if (ranks[j] <= 0) throw ValidationError("build_fack_tower: bad rank");
    if (j + 1 < ranks.size() && ranks[j] > L * ranks[j + 1])
      throw ValidationError("build_fack_tower: rank schedule violates e_j <~ L e_{j+1}");
    total += ranks[j];
  }
  if (total > ambient_dim)
    throw ValidationError("build_fack_tower: tower depth exceeds ambient dimension");

  FackTower t;
  t.L = L;
  t.ambient_dim = ambient_dim;
  int off = 0;
  for (int r : ranks) {
    MatC e = MatC::Zero(ambient_dim, ambient_dim);
    for (int i = 0; i < r; ++i) e(off + i, off + i) = 1.0;
    t.blocks.push_back(e);
    off += r;
  }
  for (size_t j = 0; j + 1 < t.blocks.size(); ++j) {
    auto w = blackadar_witness(t.blocks[j], t.blocks[j + 1], L);
    if (!w) throw ValidationError("build_fack_tower: witness construction failed");
    t.witnesses.push_back(*w);
  }
  return t;
}

FackResult fack_engine(const MatC& h, const FackTower& tower,
                       const StageDecomposer& stage, const FackOptions& opt) {
  tower.validate(opt.tol);
  const int D = tower.ambient_dim;
  if (h.rows() != D) throw ValidationError("fack_engine: dimension mismatch");
  const double nh = opnorm(h);
  if (nh > kZeroFloor && !in_her(tower.blocks[0], h, 1e-8))
    throw ValidationError("fack_engine: h is not in her(e_1)");

  const int L = tower.L;
  int L1 = 1;
  while (std::pow(opt.lambda, L1) >= 1.0 / (2.0 * L)) {
    ++L1;
    if (L1 > 64) throw ValidationError("fack_engine: lambda too close to 1");
  }
  const int K = static_cast<int>(tower.blocks.size());
  const int group_count = 3 * L + L1 * opt.M;

  FackResult out;
  out.L1 = L1;
  out.group_count = group_count;

  // Group slots: [0, L) the theorem's initial-peel pairs (vacuous for h
  // already in her(e_1)), [L, L + L1 M) the stage-decomposer groups,
  // then 2L odd/even parity groups for the bridging z, w terms.
  std::vector<std::pair<MatC, MatC>> groups(
      group_count, {MatC::Zero(D, D), MatC::Zero(D, D)});
  std::vector<BoundCheck> checks;

  MatC h_cur = h;
  MatC final_res = MatC::Zero(D, D);
  for (int n = 1; n <= K; ++n) {
    const MatC& e = tower.blocks[n - 1];
    MatC r = h_cur;
    for (int it = 0; it < L1; ++it) {
      const double nr = opnorm(r);
      DecompCertificate c = stage(r, e);
      if (static_cast<int>(c.pairs.size()) > opt.M)
        throw ValidationError("fack_engine: stage decomposer exceeded M pairs");
      const double nres = opnorm(c.residual);
      if (nres > opt.lambda * nr * (1 + 1e-8) + opt.tol * 100)
        throw ValidationError(
            "fack_engine: stage decomposer violated its residual contract");
      if (opt.C > 0) {
        for (const auto& [x, y] : c.pairs) {
          const double cap = std::sqrt(opt.C * nr) * (1 + 1e-8) + opt.tol;
          if (opnorm(x) > cap || opnorm(y) > cap)
            throw ValidationError(
                "fack_engine: stage decomposer violated its factor-norm contract");
        }
      }
      for (size_t p = 0; p < c.pairs.size(); ++p) {
        auto& g = groups[L + it * opt.M + static_cast<int>(p)];
        g.first += c.pairs[p].first;
        g.second += c.pairs[p].second;
      }
      r = c.residual;
    }
    const double nrp = opnorm(r);
    out.stage_residuals.push_back(nrp);
    checks.push_back(check_bound(
        "stage " + std::to_string(n) + " residual <= 2^-n ||h||",
        std::pow(0.5, n) * nh * (1 + 1e-6), nrp, opt.tol));

    if (n < K) {
      PeelResult peel = hereditary_peel(e, tower.blocks[n], L, r, opt.tol,
                                        tower.witnesses[n - 1]);
      const int parity = (n % 2 == 1) ? 0 : 1;
      for (int j = 0; j < L; ++j) {
        auto& g = groups[L + L1 * opt.M + parity * L + j];
        g.first += peel.pairs[j].first;
        g.second += peel.pairs[j].second;
      }
      h_cur = peel.h_tail;
      checks.push_back(check_bound(
          "stage " + std::to_string(n) + " peeled norm <= L 2^-n ||h||",
          L * std::pow(0.5, n) * nh * (1 + 1e-6), opnorm(h_cur), opt.tol));
    } else {
      final_res = r;
    }
  }

  out.cert = make_certificate(h, std::move(groups), final_res, std::move(checks));
  out.cert.bound_checks.push_back(check_bound(
      "final residual <= 2^-K ||h||", std::pow(0.5, K) * nh * (1 + 1e-6),
      opnorm(final_res), opt.tol));
  out.cert.bound_checks.push_back(
      check_bound("fack reconstruction", opt.tol * std::max(1.0, nh) * 100,
                  out.cert.reconstruction_residual, opt.tol));
  return out;
}

StageDecomposer make_matrix_stage_decomposer(double lambda, double tol) {
  return [lambda, tol](const MatC& h, const MatC& e) -> DecompCertificate {
    const int D = static_cast<int>(h.rows());
    // The tower blocks are diagonal corner projections; collect their support.
    std::vector<int> idx;
    for (int i = 0; i < D; ++i)
      if (e(i, i).real() > 0.5) idx.push_back(i);
    const int r = static_cast<int>(idx.size());
    MatC hs = MatC::Zero(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) hs(i, j) = h(idx[i], idx[j]);

    MatC zero = MatC::Zero(D, D);
    if (opnorm(hs) <= kZeroFloor)
      return make_certificate(h, {{zero, zero}, {zero, zero}}, zero);

    DecompCertificate inner = two_commutator(hs, 1, tol);
    const double keep = std::sqrt(1.0 - lambda);
    std::vector<std::pair<MatC, MatC>> pairs;
    for (auto [x, y] : inner.pairs) {
      x *= keep;
      y *= keep;
      // Balance the factor norms to sqrt scale.
      const double nx = opnorm(x), ny = opnorm(y);
      if (nx > kZeroFloor && ny > kZeroFloor) {
        const double s = std::sqrt(ny / nx);
        x *= s;
        y /= s;
      }
      MatC xe = zero, ye = zero;
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) {
          xe(idx[i], idx[j]) = x(i, j);
          ye(idx[i], idx[j]) = y(i, j);
        }
      pairs.emplace_back(xe, ye);
    }
    MatC res = h;
    for (const auto& [x, y] : pairs) res -= commutator(x, y);
    return make_certificate(h, std::move(pairs), res);
  };
}

}  // namespace cforge
