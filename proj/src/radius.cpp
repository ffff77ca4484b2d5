#include "tangraph/radius.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "tangraph/errors.hpp"
#include "tangraph/extract.hpp"
#include "tangraph/parallel.hpp"

namespace tangraph {

const char* to_string(RadiusKind kind) { return kind == RadiusKind::c0 ? "C0" : "C1"; }

const char* to_string(WitnessStatus status) {
  switch (status) {
    case WitnessStatus::pass:
      return "pass";
    case WitnessStatus::fail_norm:
      return "fail_norm";
    case WitnessStatus::not_a_graph:
      return "not_a_graph";
    case WitnessStatus::vertical:
      return "vertical";
    case WitnessStatus::boundary_escape:
      return "boundary_escape";
  }
  return "unknown";
}

std::vector<ParamPoint> sample_points(const ParamImmersion& f, const SampleSpec& spec) {
  return f.sample(spec.count, spec.seed);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Witness check_one(RadiusKind kind, const ParamImmersion& f, double r, double lambda,
                  const ParamPoint& q, const CheckOptions& options) {
  Witness w;
  w.q = q;
  w.c0 = kNaN;
  w.lip = kNaN;
  const FrameContext ctx = FrameContext::canonical(f, q, r);
  GraphSample sample;
  try {
    ExtractOptions eo;
    eo.refine_component = options.refine;
    sample = extract(ctx, options.grid, options.cell_size, eo);
  } catch (const BoundaryEscape&) {
    w.status = WitnessStatus::boundary_escape;
    return w;
  }
  if (!sample.is_graph()) {
    w.status = WitnessStatus::not_a_graph;
    return w;
  }
  const NormEstimates n = norms(sample);
  w.c0 = n.c0;
  w.lip = n.lip;
  if (kind == RadiusKind::c1) {
    if (n.vertical) {
      w.status = WitnessStatus::vertical;
    } else {
      w.status = n.lip <= lambda ? WitnessStatus::pass : WitnessStatus::fail_norm;
    }
  } else {
    w.status = n.c0 <= r * lambda ? WitnessStatus::pass : WitnessStatus::fail_norm;
  }
  return w;
}

}  // namespace

PropertyVerdict check_property(RadiusKind kind, const ParamImmersion& f, double r, double lambda,
                               std::span<const ParamPoint> q, const CheckOptions& options) {
  if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionViolated("radius must be positive");
  if (!(lambda > 0.0)) throw PreconditionViolated("lambda must be positive");
  if (q.empty()) throw PreconditionViolated("sample set is empty");

  // Points after the first definite failure are skipped; every point before
  // it is always evaluated, so the verdict does not depend on scheduling.
  std::vector<std::optional<Witness>> results(q.size());
  std::atomic<std::size_t> first_fail{q.size()};
  parallel_for(q.size(), options.threads, [&](std::size_t i) {
    if (i > first_fail.load()) return;
    Witness w = check_one(kind, f, r, lambda, q[i], options);
    const bool definite = !w.passed() && w.status != WitnessStatus::boundary_escape;
    results[i] = std::move(w);
    if (definite) {
      std::size_t current = first_fail.load();
      while (i < current && !first_fail.compare_exchange_weak(current, i)) {
      }
    }
  });

  PropertyVerdict verdict;
  verdict.holds = true;
  const std::size_t stop = first_fail.load();
  for (std::size_t i = 0; i < q.size() && i <= stop; ++i) {
    const Witness& w = *results[i];
    verdict.witnesses.push_back(w);
    if (w.status == WitnessStatus::boundary_escape) {
      verdict.holds = false;
      verdict.inconclusive = true;
    } else if (!w.passed()) {
      verdict.holds = false;
      verdict.inconclusive = false;
      verdict.failing_q = w.q;
      break;
    }
  }
  return verdict;
}

PropertyVerdict is_r_lambda(const ParamImmersion& f, double r, double lambda,
                            std::span<const ParamPoint> q, const CheckOptions& options) {
  return check_property(RadiusKind::c1, f, r, lambda, q, options);
}

PropertyVerdict is_c0_r_lambda(const ParamImmersion& f, double r, double lambda,
                               std::span<const ParamPoint> q, const CheckOptions& options) {
  return check_property(RadiusKind::c0, f, r, lambda, q, options);
}

RadiusReport max_radius(const ParamImmersion& f, double lambda, RadiusKind kind,
                        const SampleSpec& sample, double tol, const CheckOptions& options) {
  if (!(tol > 0.0 && tol <= 0.1)) throw PreconditionViolated("tol must lie in (0, 0.1]");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw PreconditionViolated("lambda must be positive");

  const std::vector<ParamPoint> q = sample_points(f, sample);
  RadiusReport report;
  report.kind = kind;
  report.lambda = lambda;
  report.tol = tol;
  report.immersion = f.name();
  report.params = f.params();
  report.sample = sample;
  report.sample_size = q.size();
  report.sampler_density = f.sampler().density;
  report.grid = options.grid;

  auto check = [&](double r) {
    ++report.evaluations;
    return check_property(kind, f, r, lambda, q, options);
  };
  auto failure_of = [](const PropertyVerdict& v) -> std::optional<Witness> {
    for (const auto& w : v.witnesses)
      if (!w.passed()) return w;
    return std::nullopt;
  };

  const double start = 1e-6 * f.length_scale();
  const double cap = 1e3 * f.length_scale();
  PropertyVerdict lo_verdict = check(start);
  if (!lo_verdict.holds) {
    report.r_lo = 0.0;
    report.r_hi = start;
    report.inconclusive = lo_verdict.inconclusive;
    report.failure_hi = failure_of(lo_verdict);
    return report;
  }

  double lo = start;
  double hi = 0.0;
  PropertyVerdict hi_verdict;
  while (true) {
    const double next = std::min(2.0 * lo, cap);
    PropertyVerdict v = check(next);
    if (v.holds) {
      lo = next;
      lo_verdict = std::move(v);
      if (lo >= cap) {
        report.unbounded = true;
        report.r_lo = lo;
        report.r_hi = std::numeric_limits<double>::infinity();
        report.witnesses_lo = std::move(lo_verdict.witnesses);
        return report;
      }
    } else {
      hi = next;
      hi_verdict = std::move(v);
      break;
    }
  }

  while (hi / lo - 1.0 > tol) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    PropertyVerdict v = check(mid);
    if (v.holds) {
      lo = mid;
      lo_verdict = std::move(v);
    } else {
      hi = mid;
      hi_verdict = std::move(v);
    }
  }

  for (double factor : {0.25, 0.5, 0.75}) {
    const PropertyVerdict v = check(factor * lo);
    if (!v.holds && !v.inconclusive)
      throw MonotonicityViolated("property fails at " + std::to_string(factor * lo) +
                                 " below the passing radius " + std::to_string(lo));
  }
  for (double factor : {1.5, 2.0}) {
    const double r = std::min(factor * hi, cap);
    const PropertyVerdict v = check(r);
    if (v.holds)
      throw MonotonicityViolated("property holds at " + std::to_string(r) +
                                 " above the failing radius " + std::to_string(hi));
  }

  report.r_lo = lo;
  report.r_hi = hi;
  report.inconclusive = hi_verdict.inconclusive;
  report.witnesses_lo = std::move(lo_verdict.witnesses);
  report.failure_hi = failure_of(hi_verdict);
  return report;
}

}  // namespace tangraph
