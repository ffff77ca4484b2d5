#include "tangraph/immersion.hpp"

#include <algorithm>
#include <cmath>

#include "tangraph/errors.hpp"

namespace tangraph {

bool Box::contains(const Vec& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) >= lo(i) && x(i) <= hi(i))) return false;
  }
  return true;
}

ParamImmersion::ParamImmersion(Data data) {
  if (data.m <= 0 || data.n <= data.m) throw InvalidParams("immersion needs 0 < m < n");
  if (data.charts.empty()) throw InvalidParams("immersion needs at least one chart");
  for (auto& chart : data.charts) {
    if (chart.domain.dim() != data.m) throw InvalidParams("chart domain has wrong dimension");
    if (chart.periodic.empty()) chart.periodic.assign(static_cast<std::size_t>(data.m), false);
    if (static_cast<int>(chart.periodic.size()) != data.m)
      throw InvalidParams("periodic flags have wrong dimension");
    for (int d = 0; d < data.m; ++d) {
      if (!(chart.domain.hi(d) > chart.domain.lo(d))) throw InvalidParams("empty chart domain");
    }
    if (!chart.eval || !chart.jacobian) throw InvalidParams("chart needs eval and jacobian");
  }
  if (data.sampler.windows.empty()) {
    for (const auto& chart : data.charts) data.sampler.windows.push_back(chart.domain);
  }
  if (data.sampler.windows.size() != data.charts.size())
    throw InvalidParams("sampler needs one window per chart");
  if (data.sampler.density <= 0) throw InvalidParams("sampler density must be positive");
  if (!(data.length_scale > 0.0)) throw InvalidParams("length scale must be positive");
  data_ = std::make_shared<const Data>(std::move(data));
}

Vec ParamImmersion::eval(const ParamPoint& p) const { return chart(p.chart).eval(p.coords); }

Mat ParamImmersion::jacobian(const ParamPoint& p) const {
  return chart(p.chart).jacobian(p.coords);
}

std::optional<ParamPoint> ParamImmersion::locate(const Vec& y) const {
  if (!data_->locate) return std::nullopt;
  return data_->locate(y);
}

std::optional<ParamPoint> ParamImmersion::normalize(const ParamPoint& p) const {
  if (p.chart < 0 || p.chart >= static_cast<int>(charts().size())) return std::nullopt;
  if (!p.coords.allFinite()) return std::nullopt;
  const Chart& c = chart(p.chart);
  ParamPoint out = p;
  for (int d = 0; d < m(); ++d) {
    if (!c.periodic[static_cast<std::size_t>(d)]) continue;
    const double lo = c.domain.lo(d);
    const double period = c.domain.hi(d) - lo;
    double t = std::fmod(out.coords(d) - lo, period);
    if (t < 0.0) t += period;
    if (t >= period) t = 0.0;
    out.coords(d) = lo + t;
  }
  if (c.domain.contains(out.coords)) return out;
  if (!data_->locate) return std::nullopt;
  auto moved = data_->locate(c.eval(out.coords));
  if (!moved || !chart(moved->chart).domain.contains(moved->coords)) return std::nullopt;
  return moved;
}

std::size_t ParamImmersion::lattice_size() const {
  std::size_t per_chart = 1;
  for (int d = 0; d < m(); ++d) per_chart *= static_cast<std::size_t>(sampler().density);
  return per_chart * charts().size();
}

std::vector<ParamPoint> ParamImmersion::sample(std::size_t count, std::uint64_t seed) const {
  const int density = sampler().density;
  std::vector<ParamPoint> lattice;
  lattice.reserve(lattice_size());
  for (std::size_t c = 0; c < charts().size(); ++c) {
    const Box& window = sampler().windows[c];
    std::vector<int> index(static_cast<std::size_t>(m()), 0);
    while (true) {
      ParamPoint p{static_cast<int>(c), Vec(m())};
      for (int d = 0; d < m(); ++d) {
        const double frac = (index[static_cast<std::size_t>(d)] + 0.5) / density;
        p.coords(d) = window.lo(d) + frac * (window.hi(d) - window.lo(d));
      }
      lattice.push_back(std::move(p));
      int d = 0;
      while (d < m() && ++index[static_cast<std::size_t>(d)] == density) {
        index[static_cast<std::size_t>(d)] = 0;
        ++d;
      }
      if (d == m()) break;
    }
  }
  if (count == 0 || count >= lattice.size()) return lattice;

  // Partial Fisher-Yates driven directly by the engine output so the
  // selection is identical across standard library implementations.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(lattice.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t span = order.size() - i;
    const std::size_t j = i + static_cast<std::size_t>(rng() % span);
    std::swap(order[i], order[j]);
  }
  order.resize(count);
  std::sort(order.begin(), order.end());
  std::vector<ParamPoint> out;
  out.reserve(count);
  for (std::size_t i : order) out.push_back(lattice[i]);
  return out;
}

ParamImmersion ParamImmersion::transformed(const Isometry& motion, double scale) const {
  if (motion.dim() != n()) throw InvalidParams("motion dimension does not match immersion");
  if (!(scale > 0.0)) throw InvalidParams("scale must be positive");
  Data data = *data_;
  const Mat rotation = motion.rotation();
  const Vec translation = motion.translation();
  for (auto& chart : data.charts) {
    auto eval = chart.eval;
    auto jac = chart.jacobian;
    chart.eval = [eval, rotation, translation, scale](const Vec& x) -> Vec {
      return scale * (rotation * eval(x) + translation);
    };
    chart.jacobian = [jac, rotation, scale](const Vec& x) -> Mat {
      return scale * (rotation * jac(x));
    };
  }
  if (data.locate) {
    auto locate = data.locate;
    data.locate = [locate, rotation, translation, scale](const Vec& y) {
      return locate(rotation.transpose() * (y / scale - translation));
    };
  }
  data.jacobian_bound *= scale;
  data.length_scale *= scale;
  return ParamImmersion(std::move(data));
}

Subspace tangent_space(const ParamImmersion& f, const ParamPoint& p) {
  const Mat j = f.jacobian(p);
  Eigen::JacobiSVD<Mat> svd(j);
  if (svd.singularValues()(j.cols() - 1) <= kImmersionRankTolerance)
    throw RankDeficient("Jacobian is not injective at this parameter");
  return Subspace::from_spanning(j);
}

}  // namespace tangraph
