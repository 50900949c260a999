#include "capdisp/vc.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <utility>

#include "capdisp/lp.hpp"
#include "capdisp/parallel.hpp"
#include "capdisp/solver.hpp"
#include "capdisp/sphere_grid.hpp"
#include "capdisp/volume.hpp"

namespace capdisp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMarginTol = 1e-9;
constexpr double kCertTol = 1e-7;
constexpr std::int64_t kMaterializeBudget = 10000000;
constexpr std::int64_t kNetCenterBudget = 4000000;

std::uint64_t family_stream(int d, double gamma) {
  return static_cast<std::uint64_t>(d) * 0x9e3779b97f4a7c15ULL ^
         std::bit_cast<std::uint64_t>(gamma);
}

double min_geodesic_to_set(const PointSet& P, const Vec& u) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < P.n(); ++i)
    best = std::min(best, geodesic_distance(P.X.col(i), u));
  return best;
}

// T = {}: a cap realizing the empty subset is any cap missing every point.
// Cheap candidate directions almost always expose a gap; if they all sit on
// top of P, fall back to the covering-radius search, whose witness center is
// the deepest hole by definition.
CapRealization empty_subset_witness(const PointSet& P) {
  const int D = P.d + 1;
  std::vector<Vec> candidates;
  Vec centroid = P.X.rowwise().sum();
  if (centroid.norm() > 1e-12) candidates.push_back(-centroid.normalized());
  for (int i = 0; i < P.n(); ++i) candidates.push_back(-P.X.col(i));
  for (int k = 0; k < D; ++k) {
    Vec e = Vec::Zero(D);
    e(k) = 1.0;
    candidates.push_back(e);
    candidates.push_back(-e);
  }
  Vec best_u;
  double best_gap = 0.0;
  for (const Vec& u : candidates) {
    double gap = min_geodesic_to_set(P, u);
    if (gap > best_gap) {
      best_gap = gap;
      best_u = u;
    }
  }
  if (best_gap <= kMarginTol) {
    Rng fallback(0x766373ULL);
    DispersionResult hole = covering_radius_opt(P, 6, fallback);
    const Cap& w = std::get<Cap>(hole.witness);
    double gap = min_geodesic_to_set(P, w.center);
    if (gap > best_gap) {
      best_gap = gap;
      best_u = w.center;
    }
  }
  CapRealization out;
  if (best_gap <= 1e-12) {
    out.note = "no direction clear of the point set was found";
    return out;
  }
  out.status = Realization::yes;
  out.witness = make_cap(best_u, 0.5 * best_gap);
  out.margin = 0.5 * best_gap;
  return out;
}

}  // namespace

BigInt phi_sauer_shelah(int d, int m) {
  if (d < 0 || m < 1)
    throw std::invalid_argument("phi_sauer_shelah requires d >= 0 and m >= 1");
  if (d >= m) return BigInt(1) << m;
  BigInt total = 1;  // C(m, 0)
  BigInt binom = 1;
  for (int k = 1; k <= d; ++k) {
    binom *= m - k + 1;
    binom /= k;
    total += binom;
  }
  return total;
}

CapRealization cap_realizes(const PointSet& P, std::uint64_t mask) {
  const int n = P.n();
  const int D = P.d + 1;
  if (n < 1 || n > 63)
    throw std::invalid_argument("cap_realizes supports 1..63 points");
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  if (mask & ~full) throw std::invalid_argument("subset mask has bits beyond |P|");

  if (mask == 0) return empty_subset_witness(P);
  if (mask == full) {
    CapRealization out;
    out.status = Realization::yes;
    Vec e = Vec::Zero(D);
    e(0) = 1.0;
    out.witness = make_cap(e, kPi);
    out.margin = 1.0;
    return out;
  }

  // Maximize the margin m of <x, u> >= t + m on T and <x, u> <= t - m off T,
  // with u in the unit box. Shifted variables u' = u + 1, t' = t + Bt make
  // the box and in-subset rows start feasible; the off-subset rows have
  // negative right-hand sides and rely on the solver's first phase.
  const double Bt = std::sqrt(static_cast<double>(D)) + 1.0;
  const int nvars = D + 2;  // u' (D), t', margin
  const int nrows = n + D + 2;
  Mat A = Mat::Zero(nrows, nvars);
  Vec b(nrows);
  Vec c = Vec::Zero(nvars);
  c(D + 1) = 1.0;
  for (int i = 0; i < n; ++i) {
    const double row_sum = P.X.col(i).sum();
    if (mask >> i & 1) {
      A.row(i).head(D) = -P.X.col(i).transpose();
      A(i, D) = 1.0;
      b(i) = Bt - row_sum;
    } else {
      A.row(i).head(D) = P.X.col(i).transpose();
      A(i, D) = -1.0;
      b(i) = row_sum - Bt;
    }
    A(i, D + 1) = 1.0;
  }
  for (int k = 0; k < D; ++k) {
    A(n + k, k) = 1.0;
    b(n + k) = 2.0;
  }
  A(n + D, D) = 1.0;
  b(n + D) = 2.0 * Bt;
  A(n + D + 1, D + 1) = 1.0;
  b(n + D + 1) = 4.0 * Bt;

  LpResult lp = solve_lp_max(A, b, c);
  CapRealization out;
  if (lp.status != LpStatus::optimal) {
    out.note = "lp status: " + to_string(lp.status);
    return out;
  }

  Vec u = lp.x.head(D) - Vec::Ones(D);
  const double t = lp.x(D) - Bt;
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double s = P.X.col(i).dot(u);
    margin = std::min(margin, (mask >> i & 1) ? s - t : t - s);
  }
  const bool certified =
      lp.primal_residual <= kCertTol && lp.dual_residual <= kCertTol &&
      lp.duality_gap <= kCertTol * std::max(1.0, std::abs(lp.objective));

  if (margin >= kMarginTol) {
    const double norm = u.norm();
    if (norm < 1e-12) {
      out.note = "separating direction collapsed to zero";
      return out;
    }
    const double cos_thresh =
        std::clamp((t + 0.5 * margin) / norm, -1.0, 1.0);
    out.status = Realization::yes;
    out.witness = make_cap(u / norm, std::acos(cos_thresh));
    out.margin = margin;
    return out;
  }
  if (certified && lp.objective < kMarginTol) {
    out.status = Realization::no;
    out.margin = lp.objective;
    return out;
  }
  out.note = "margin below tolerance without a tight certificate";
  return out;
}

ShatterCount empirical_shatter(const PointSet& P) {
  const int m = P.n();
  if (m < 1 || m > 22)
    throw std::invalid_argument("empirical_shatter enumerates 2^m subsets and requires 1 <= |P| <= 22");
  const std::int64_t total = std::int64_t{1} << m;
  std::atomic<std::int64_t> realized{0};
  std::atomic<std::int64_t> undecided{0};
  parallel_for(total, 256, [&](std::int64_t mask) {
    CapRealization r = cap_realizes(P, static_cast<std::uint64_t>(mask));
    if (r.status == Realization::yes)
      realized.fetch_add(1, std::memory_order_relaxed);
    else if (r.status == Realization::undecided)
      undecided.fetch_add(1, std::memory_order_relaxed);
  });
  return {realized.load(), undecided.load()};
}

std::optional<PointSet> vc_lower_bound_search(int d, int k, std::int64_t trials,
                                              const Rng& rng) {
  if (k < 1) throw std::invalid_argument("vc_lower_bound_search requires k >= 1");
  if (k > 22) throw std::invalid_argument("vc_lower_bound_search shatter check requires k <= 22");
  if (trials <= 0) return std::nullopt;

  const std::uint64_t nmasks = std::uint64_t{1} << k;
  auto shattered = [&](const PointSet& Q) {
    for (std::uint64_t mask = 0; mask < nmasks; ++mask) {
      if (cap_realizes(Q, mask).status != Realization::yes) return false;
    }
    return true;
  };

  // First-success semantics: the winner is the lowest trial index, so chunks
  // may only skip trials beyond a success already on record.
  std::atomic<std::int64_t> best{trials};
  const std::int64_t chunks =
      std::min<std::int64_t>(trials, worker_count() * 4L);
  const std::int64_t per = (trials + chunks - 1) / chunks;
  run_chunks(chunks, [&](std::int64_t ci) {
    const std::int64_t lo = ci * per;
    const std::int64_t hi = std::min(trials, lo + per);
    for (std::int64_t r = lo; r < hi; ++r) {
      if (r >= best.load(std::memory_order_acquire)) break;
      Rng child = rng.derive(static_cast<std::uint64_t>(r));
      PointSet Q = sample_uniform(d, k, child);
      if (!shattered(Q)) continue;
      std::int64_t prev = best.load(std::memory_order_acquire);
      while (r < prev &&
             !best.compare_exchange_weak(prev, r, std::memory_order_acq_rel)) {
      }
      break;
    }
  });

  const std::int64_t found = best.load();
  if (found >= trials) return std::nullopt;
  Rng child = rng.derive(static_cast<std::uint64_t>(found));
  PointSet Q = sample_uniform(d, k, child);
  Q.label = "shattered d=" + std::to_string(d) + " k=" + std::to_string(k) +
            " trial=" + std::to_string(found);
  return Q;
}

TraversalBound vc_traversal_bound(std::int64_t m, std::int64_t d, double eps) {
  if (d < 1 || m < d)
    throw std::invalid_argument("vc_traversal_bound requires m >= d >= 1");
  if (!(eps > 0.0))
    throw std::invalid_argument("vc_traversal_bound requires eps > 0");
  const double md = static_cast<double>(m) / static_cast<double>(d);
  const double ln2 = std::log(2.0);
  TraversalBound out;
  out.log_value = ln2 + static_cast<double>(d) * (ln2 + 1.0 + std::log(md)) -
                  0.5 * eps * static_cast<double>(m) * ln2;
  out.value = std::exp(out.log_value);
  out.informative = out.log_value < 0.0;
  return out;
}

namespace {

// Deterministic geodesic eps-net: the half-step lattice on every facet of the
// cube [-1,1]^{d+1}, pushed radially onto the sphere. Radial projection is
// 1-Lipschitz on a facet (|x| >= 1 there), so with K >= sqrt(d)/(0.9 eps)
// cells of side 2/K every sphere point ends up within 0.9 eps (plus a
// sub-percent chord-to-arc correction) of some node. Covering holds by
// construction; the probe pass re-checks it against implementation mistakes.
// Randomized maximal-separation nets were rejected here: saturating one at
// the resolutions the families need (~1e6 centers) costs ~1e10 proposals.
PointSet build_verified_net(int d, double eps, Rng rng,
                            std::shared_ptr<const SphereGrid>* index_out) {
  const int m = d + 1;
  const auto K = static_cast<std::int64_t>(
      std::ceil(std::sqrt(static_cast<double>(d)) / (0.9 * eps)));
  const double projected =
      2.0 * m * std::pow(static_cast<double>(K), static_cast<double>(d));
  if (projected > static_cast<double>(kNetCenterBudget)) {
    char msg[200];
    std::snprintf(msg, sizeof(msg),
                  "eps-net needs about %.3g centers at resolution %.6g "
                  "(budget %lld); raise gamma or lower d",
                  projected, eps, static_cast<long long>(kNetCenterBudget));
    throw std::runtime_error(msg);
  }
  std::int64_t per_face = 1;
  for (int t = 0; t < d; ++t) per_face *= K;
  const double step = 2.0 / static_cast<double>(K);

  Mat X(m, static_cast<Eigen::Index>(2 * m * per_face));
  auto grid = std::make_shared<SphereGrid>(m, eps);
  Eigen::Index col = 0;
  std::vector<std::int64_t> odo(static_cast<std::size_t>(d), 0);
  Vec p(m);
  for (int j = 0; j < m; ++j) {
    for (double sign : {1.0, -1.0}) {
      std::fill(odo.begin(), odo.end(), 0);
      for (;;) {
        p(j) = sign;
        for (int t = 0, a = 0; t < m; ++t) {
          if (t == j) continue;
          p(t) = -1.0 + (static_cast<double>(odo[static_cast<std::size_t>(a)]) + 0.5) * step;
          ++a;
        }
        p.normalize();
        X.col(col) = p;
        grid->insert(p);
        ++col;
        int a = d - 1;
        while (a >= 0) {
          auto ai = static_cast<std::size_t>(a);
          if (++odo[ai] < K) break;
          odo[ai] = 0;
          --a;
        }
        if (a < 0) break;
      }
    }
  }
  PointSet net = make_point_set(d, std::move(X), "grid_net");

  const int kProbes = 20000;
  for (int pr = 0; pr < kProbes; ++pr) {
    Vec q = sample_uniform_point(m, rng);
    if (!grid->has_within(q, eps)) {
      double gap = min_geodesic_to_set(net, q);
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "net not maximal: probe point lies %.6g from the net "
                    "(resolution %.6g)",
                    gap, eps);
      throw std::runtime_error(msg);
    }
  }
  *index_out = std::move(grid);
  return net;
}

[[noreturn]] void wrong_kind(const char* op) {
  throw std::invalid_argument(std::string(op) + ": family kind mismatch");
}

}  // namespace

Cap ApproxFamily::cap_member(std::int64_t index) const {
  if (kind != FamilyKind::caps) wrong_kind("cap_member");
  if (index < 0 || index >= net_size())
    throw std::out_of_range("cap_member index");
  return make_cap(centers.X.col(static_cast<int>(index)), radii[0]);
}

Lens ApproxFamily::lens_member(std::int64_t index) const {
  if (kind != FamilyKind::lenses) wrong_kind("lens_member");
  if (index < 0 || static_cast<double>(index) >= member_count)
    throw std::out_of_range("lens_member index");
  const std::int64_t A = net_size();
  const std::int64_t B = static_cast<std::int64_t>(radii.size());
  std::int64_t rest = index;
  const std::int64_t r2 = rest % B;
  rest /= B;
  const std::int64_t c2 = rest % A;
  rest /= A;
  const std::int64_t r1 = rest % B;
  const std::int64_t c1 = rest / B;
  return make_lens({make_cap(centers.X.col(static_cast<int>(c1)),
                             radii[static_cast<std::size_t>(r1)]),
                    make_cap(centers.X.col(static_cast<int>(c2)),
                             radii[static_cast<std::size_t>(r2)])});
}

Cap ApproxFamily::approximate(const Cap& target) const {
  if (kind != FamilyKind::caps) wrong_kind("approximate(Cap)");
  const int idx = net_index->nearest_within(target.center, eps);
  if (idx < 0)
    throw std::runtime_error("net not maximal: no center within eps of the target");
  return make_cap(centers.X.col(idx), radii[0]);
}

Lens ApproxFamily::approximate(const Lens& target) const {
  if (kind != FamilyKind::lenses) wrong_kind("approximate(Lens)");
  if (target.caps.empty() || target.caps.size() > 2)
    throw std::invalid_argument("lens approximation expects one or two caps");
  const std::int64_t kmax = static_cast<std::int64_t>(radii.size()) - 1;
  std::vector<Cap> member;
  for (const Cap& cap : target.caps) {
    const int idx = net_index->nearest_within(cap.center, eps);
    if (idx < 0)
      throw std::runtime_error("net not maximal: no center within eps of the target");
    // The grid radius two steps below the target radius: containment costs
    // one step for the interval rounding and one for the center move.
    std::int64_t ell =
        cap.radius >= kPi
            ? 1
            : static_cast<std::int64_t>(std::floor((kPi - cap.radius) / eps)) + 1;
    ell = std::clamp<std::int64_t>(ell, 1, kmax);
    member.push_back(make_cap(centers.X.col(idx), radii[static_cast<std::size_t>(ell)]));
  }
  if (member.size() == 1)
    member.push_back(make_cap(member[0].center, radii[1]));
  return make_lens(std::move(member));
}

ApproxFamily delta_approx_caps(int d, double gamma) {
  if (d < 2) throw std::invalid_argument("delta_approx_caps requires d >= 2");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("delta_approx_caps requires gamma in (0, 1)");
  VolumeFn vf(d);
  const double delta = vf.inverse(gamma);
  const double eps = gamma * delta / (3.0 * d);

  ApproxFamily f;
  f.kind = FamilyKind::caps;
  f.d = d;
  f.gamma = gamma;
  f.c0 = 0.5;
  f.delta = delta;
  f.eps = eps;
  Rng rng(0x63617073ULL, family_stream(d, gamma));
  f.centers = build_verified_net(d, eps, rng, &f.net_index);
  f.radii = {delta - eps};
  f.member_count = static_cast<double>(f.centers.n());
  f.log_member_count = std::log(f.member_count);
  f.log_cardinality_bound =
      std::log(2.0) + d * std::log(3.0 * d * kPi / (gamma * gamma));
  f.cardinality_bound = std::exp(f.log_cardinality_bound);
  return f;
}

ApproxFamily delta_approx_lenses(int d, double gamma) {
  if (d < 2) throw std::invalid_argument("delta_approx_lenses requires d >= 2");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("delta_approx_lenses requires gamma in (0, 1)");
  const double eps = gamma * gamma / (12.0 * d);
  const std::int64_t k =
      static_cast<std::int64_t>(std::ceil((kPi - gamma) / eps));

  ApproxFamily f;
  f.kind = FamilyKind::lenses;
  f.d = d;
  f.gamma = gamma;
  f.c0 = 0.5;
  f.eps = eps;
  Rng rng(0x6c656e73ULL, family_stream(d, gamma));
  f.centers = build_verified_net(d, eps, rng, &f.net_index);
  f.radii.resize(static_cast<std::size_t>(k) + 1);
  for (std::int64_t i = 0; i <= k; ++i)
    f.radii[static_cast<std::size_t>(i)] = kPi - static_cast<double>(i + 1) * eps;
  const double pairs = static_cast<double>(f.centers.n()) *
                       static_cast<double>(k + 1);
  f.member_count = pairs * pairs;
  f.log_member_count = 2.0 * std::log(pairs);
  f.log_cardinality_bound =
      std::log(9.0) +
      2.0 * (d + 1) * std::log(12.0 * d * kPi / (gamma * gamma));
  f.cardinality_bound = std::exp(f.log_cardinality_bound);
  return f;
}

namespace {

[[noreturn]] void too_large(const ApproxFamily& f) {
  char msg[200];
  std::snprintf(msg, sizeof(msg),
                "family too large to materialize: %.0f members "
                "(closed-form cardinality bound %.6g, budget %lld)",
                f.member_count, f.cardinality_bound,
                static_cast<long long>(kMaterializeBudget));
  throw std::runtime_error(msg);
}

}  // namespace

std::vector<Cap> materialize_caps(const ApproxFamily& f) {
  if (f.kind != FamilyKind::caps) wrong_kind("materialize_caps");
  if (f.member_count > static_cast<double>(kMaterializeBudget)) too_large(f);
  std::vector<Cap> out;
  out.reserve(static_cast<std::size_t>(f.member_count));
  for (std::int64_t i = 0; i < f.net_size(); ++i) out.push_back(f.cap_member(i));
  return out;
}

std::vector<Lens> materialize_lenses(const ApproxFamily& f) {
  if (f.kind != FamilyKind::lenses) wrong_kind("materialize_lenses");
  if (f.member_count > static_cast<double>(kMaterializeBudget)) too_large(f);
  std::vector<Lens> out;
  out.reserve(static_cast<std::size_t>(f.member_count));
  const std::int64_t total = static_cast<std::int64_t>(f.member_count);
  for (std::int64_t i = 0; i < total; ++i) out.push_back(f.lens_member(i));
  return out;
}

namespace {

void check_bound_params(double c0, double gamma) {
  if (!(c0 > 0.0 && c0 < 1.0))
    throw std::invalid_argument("n_from_approx requires c0 in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("n_from_approx requires gamma in (0, 1)");
}

}  // namespace

double n_from_approx_log(double c0, double gamma, double log_family_size,
                         NetBoundVariant variant) {
  check_bound_params(c0, gamma);
  const double cg = c0 * gamma;
  if (variant == NetBoundVariant::random_choice) {
    if (log_family_size < std::log(3.0) - 1e-12)
      throw std::invalid_argument(
          "random_choice variant requires a family of at least 3 members");
    return 3.0 * log_family_size / cg;
  }
  if (!(gamma < 1.0 / (3.0 * c0)))
    throw std::invalid_argument(
        "derandomized variant requires gamma < 1/(3 c0)");
  if (log_family_size < 1.0 - std::log(cg) - 1e-12)
    throw std::invalid_argument(
        "derandomized variant requires at least e/(c0 gamma) members");
  return (std::log(4.0 * cg) + log_family_size) / cg;
}

double n_from_approx(double c0, double gamma, double family_size,
                     NetBoundVariant variant) {
  check_bound_params(c0, gamma);
  if (!(family_size >= 1.0))
    throw std::invalid_argument("n_from_approx requires a nonempty family");
  return n_from_approx_log(c0, gamma, std::log(family_size), variant);
}

}  // namespace capdisp
