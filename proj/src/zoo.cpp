#include "tangraph/zoo.hpp"

#include <cmath>
#include <numbers>

#include "tangraph/errors.hpp"

namespace tangraph {
namespace {

using std::numbers::pi;

Box make_box(int m, double lo, double hi) {
  return Box{Vec::Constant(m, lo), Vec::Constant(m, hi)};
}

int integral_param(const Params& p, const std::string& key, int lo, int hi) {
  const double v = p.at(key);
  if (!(v == std::floor(v)) || v < lo || v > hi)
    throw InvalidParams(key + " must be an integer in [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
  return static_cast<int>(v);
}

void require_positive(const Params& p, const std::string& key) {
  if (!(p.at(key) > 0.0) || !std::isfinite(p.at(key)))
    throw InvalidParams(key + " must be positive");
}

ParamImmersion graph_of_quadratic(const Params& p) {
  const int m = integral_param(p, "m", 1, 2);
  const double a = p.at("a");
  const double b = p.at("b");
  require_positive(p, "extent");
  require_positive(p, "window");
  const double extent = p.at("extent");
  const double window = p.at("window");
  if (window > extent) throw InvalidParams("window must not exceed extent");
  if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidParams("a and b must be finite");
  HeightFn height = [m, a, b](const Vec& x) -> Vec {
    Vec u(1);
    u(0) = 0.5 * a * x(0) * x(0) + (m > 1 ? 0.5 * b * x(1) * x(1) : 0.0);
    return u;
  };
  HeightJacobianFn jac = [m, a, b](const Vec& x) -> Mat {
    Mat d(1, m);
    d(0, 0) = a * x(0);
    if (m > 1) d(0, 1) = b * x(1);
    return d;
  };
  const double slope = std::max(std::abs(a), std::abs(b)) * extent * std::sqrt(double(m));
  auto f = make_graph_of(height, jac, make_box(m, -extent, extent), 1,
                         std::sqrt(1.0 + slope * slope), make_box(m, -window, window), p);
  return f;
}

std::vector<ZooEntry> build_entries() {
  std::vector<ZooEntry> entries;
  entries.push_back({"flat", "x -> (x, 0) in R^{m+k}", {{"m", 2}, {"k", 1}, {"extent", 2000}},
                     [](const Params& p) {
                       require_positive(p, "extent");
                       return make_flat(integral_param(p, "m", 1, 6),
                                        integral_param(p, "k", 1, 10), p.at("extent"));
                     }});
  entries.push_back({"circle", "circle of radius R in R^2", {{"R", 1}}, [](const Params& p) {
                       require_positive(p, "R");
                       return make_circle(p.at("R"));
                     }});
  entries.push_back({"sphere2", "round 2-sphere of radius R in R^3 (six cube-face charts)",
                     {{"R", 1}}, [](const Params& p) {
                       require_positive(p, "R");
                       return make_sphere(p.at("R"));
                     }});
  entries.push_back({"torus", "torus of revolution in R^3", {{"R_maj", 2}, {"r_min", 0.5}},
                     [](const Params& p) {
                       require_positive(p, "R_maj");
                       require_positive(p, "r_min");
                       if (!(p.at("r_min") < p.at("R_maj")))
                         throw InvalidParams("torus needs r_min < R_maj");
                       return make_torus(p.at("R_maj"), p.at("r_min"));
                     }});
  entries.push_back({"helix", "t -> (cos t, sin t, h t) for |t| <= T", {{"h", 1}, {"T", 20}},
                     [](const Params& p) {
                       require_positive(p, "h");
                       require_positive(p, "T");
                       return make_helix(p.at("h"), p.at("T"));
                     }});
  entries.push_back({"graph_of",
                     "x -> (x, a x1^2/2 + b x2^2/2) over [-extent, extent]^m (m = 1 or 2)",
                     {{"m", 2}, {"a", 1}, {"b", -0.5}, {"extent", 3}, {"window", 0.5}},
                     graph_of_quadratic});
  entries.push_back({"wiggle", "t -> (t, eps sin(2 pi t / delta)), the tangent-plane counterexample",
                     {{"eps", 1e-6}, {"delta", 1e-7}, {"window", 1}, {"margin", 2}},
                     [](const Params& p) {
                       return make_wiggle(p.at("eps"), p.at("delta"), p.at("window"),
                                          p.at("margin"));
                     }});
  return entries;
}

}  // namespace

const std::vector<ZooEntry>& zoo_entries() {
  static const std::vector<ZooEntry> entries = build_entries();
  return entries;
}

ParamImmersion zoo_build(std::string_view name, const Params& params) {
  for (const auto& entry : zoo_entries()) {
    if (entry.name != name) continue;
    Params merged = entry.defaults;
    for (const auto& [key, value] : params) {
      if (!entry.defaults.contains(key))
        throw InvalidParams("unknown parameter '" + key + "' for " + entry.name);
      merged[key] = value;
    }
    return entry.builder(merged);
  }
  throw UnknownEntry("unknown zoo entry '" + std::string(name) + "'");
}

ParamImmersion make_flat(int m, int k, double extent) {
  if (m < 1 || k < 1) throw InvalidParams("flat needs m, k >= 1");
  if (!(extent > 1.0)) throw InvalidParams("flat extent must exceed the sampling window");
  ParamImmersion::Data data;
  data.name = "flat";
  data.params = {{"m", m}, {"k", k}, {"extent", extent}};
  data.m = m;
  data.n = m + k;
  const int n = m + k;
  Chart chart;
  chart.domain = make_box(m, -extent, extent);
  chart.eval = [n, m](const Vec& x) -> Vec {
    Vec y = Vec::Zero(n);
    y.head(m) = x;
    return y;
  };
  chart.jacobian = [n, m](const Vec&) -> Mat { return Mat::Identity(n, m); };
  data.charts.push_back(std::move(chart));
  data.sampler.windows.push_back(make_box(m, -1.0, 1.0));
  data.jacobian_bound = 1.0;
  data.length_scale = 1.0;
  return ParamImmersion(std::move(data));
}

ParamImmersion make_circle(double radius) {
  if (!(radius > 0.0)) throw InvalidParams("circle radius must be positive");
  ParamImmersion::Data data;
  data.name = "circle";
  data.params = {{"R", radius}};
  data.m = 1;
  data.n = 2;
  Chart chart;
  chart.domain = make_box(1, -pi, pi);
  chart.periodic = {true};
  chart.eval = [radius](const Vec& t) -> Vec {
    return Vec{{radius * std::cos(t(0)), radius * std::sin(t(0))}};
  };
  chart.jacobian = [radius](const Vec& t) -> Mat {
    Mat j(2, 1);
    j << -radius * std::sin(t(0)), radius * std::cos(t(0));
    return j;
  };
  data.charts.push_back(std::move(chart));
  data.jacobian_bound = radius;
  data.length_scale = radius;
  return ParamImmersion(std::move(data));
}

ParamImmersion make_sphere(double radius) {
  if (!(radius > 0.0)) throw InvalidParams("sphere radius must be positive");
  ParamImmersion::Data data;
  data.name = "sphere2";
  data.params = {{"R", radius}};
  data.m = 2;
  data.n = 3;
  // Face f sits on axis f/2 with sign +1 for even f; (u, v) run along the
  // two following axes in cyclic order.
  for (int face = 0; face < 6; ++face) {
    const int a = face / 2;
    const double s = (face % 2 == 0) ? 1.0 : -1.0;
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    Chart chart;
    chart.domain = make_box(2, -1.0, 1.0);
    chart.eval = [=](const Vec& x) -> Vec {
      Vec w = Vec::Zero(3);
      w(a) = s;
      w(b) = x(0);
      w(c) = x(1);
      return radius * w / w.norm();
    };
    chart.jacobian = [=](const Vec& x) -> Mat {
      Vec w = Vec::Zero(3);
      w(a) = s;
      w(b) = x(0);
      w(c) = x(1);
      const double rho2 = w.squaredNorm();
      const double rho = std::sqrt(rho2);
      Mat j(3, 2);
      Vec eb = Vec::Zero(3);
      eb(b) = 1.0;
      Vec ec = Vec::Zero(3);
      ec(c) = 1.0;
      j.col(0) = radius * (eb - x(0) * w / rho2) / rho;
      j.col(1) = radius * (ec - x(1) * w / rho2) / rho;
      return j;
    };
    data.charts.push_back(std::move(chart));
  }
  data.locate = [](const Vec& y) -> std::optional<ParamPoint> {
    int a = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(y(i)) > std::abs(y(a))) a = i;
    }
    if (!(std::abs(y(a)) > 0.0)) return std::nullopt;
    const int face = 2 * a + (y(a) > 0.0 ? 0 : 1);
    const double scale = 1.0 / std::abs(y(a));
    Vec uv(2);
    uv << y((a + 1) % 3) * scale, y((a + 2) % 3) * scale;
    return ParamPoint{face, uv};
  };
  data.jacobian_bound = radius;
  data.length_scale = radius;
  return ParamImmersion(std::move(data));
}

ParamImmersion make_torus(double major, double minor) {
  if (!(major > 0.0) || !(minor > 0.0) || !(minor < major))
    throw InvalidParams("torus needs 0 < r_min < R_maj");
  ParamImmersion::Data data;
  data.name = "torus";
  data.params = {{"R_maj", major}, {"r_min", minor}};
  data.m = 2;
  data.n = 3;
  Chart chart;
  chart.domain = make_box(2, -pi, pi);
  chart.periodic = {true, true};
  chart.eval = [major, minor](const Vec& x) -> Vec {
    const double ring = major + minor * std::cos(x(0));
    return Vec{{ring * std::cos(x(1)), ring * std::sin(x(1)), minor * std::sin(x(0))}};
  };
  chart.jacobian = [major, minor](const Vec& x) -> Mat {
    const double ring = major + minor * std::cos(x(0));
    Mat j(3, 2);
    j << -minor * std::sin(x(0)) * std::cos(x(1)), -ring * std::sin(x(1)),
        -minor * std::sin(x(0)) * std::sin(x(1)), ring * std::cos(x(1)),
        minor * std::cos(x(0)), 0.0;
    return j;
  };
  data.charts.push_back(std::move(chart));
  data.jacobian_bound = major + minor;
  data.length_scale = major + minor;
  return ParamImmersion(std::move(data));
}

ParamImmersion make_helix(double pitch, double half_length) {
  if (!(pitch > 0.0) || !(half_length > 2.0 * pi))
    throw InvalidParams("helix needs h > 0 and T > 2 pi");
  ParamImmersion::Data data;
  data.name = "helix";
  data.params = {{"h", pitch}, {"T", half_length}};
  data.m = 1;
  data.n = 3;
  Chart chart;
  chart.domain = make_box(1, -half_length, half_length);
  chart.eval = [pitch](const Vec& t) -> Vec {
    return Vec{{std::cos(t(0)), std::sin(t(0)), pitch * t(0)}};
  };
  chart.jacobian = [pitch](const Vec& t) -> Mat {
    Mat j(3, 1);
    j << -std::sin(t(0)), std::cos(t(0)), pitch;
    return j;
  };
  data.charts.push_back(std::move(chart));
  data.sampler.windows.push_back(make_box(1, -2.0 * pi, 2.0 * pi));
  data.jacobian_bound = std::sqrt(1.0 + pitch * pitch);
  data.length_scale = 1.0;
  return ParamImmersion(std::move(data));
}

ParamImmersion make_graph_of(HeightFn height, HeightJacobianFn height_jacobian, Box domain,
                             int k, double jacobian_bound, std::optional<Box> window,
                             Params params) {
  const int m = domain.dim();
  if (m < 1 || k < 1) throw InvalidParams("graph_of needs m, k >= 1");
  if (!height || !height_jacobian) throw InvalidParams("graph_of needs height and jacobian");
  ParamImmersion::Data data;
  data.name = "graph_of";
  data.params = std::move(params);
  data.m = m;
  data.n = m + k;
  const int n = m + k;
  Chart chart;
  chart.domain = domain;
  chart.eval = [height, n, m, k](const Vec& x) -> Vec {
    Vec y(n);
    y.head(m) = x;
    const Vec u = height(x);
    if (u.size() != k) throw InvalidParams("height function returned the wrong dimension");
    y.tail(k) = u;
    return y;
  };
  chart.jacobian = [height_jacobian, n, m, k](const Vec& x) -> Mat {
    Mat j(n, m);
    j.topRows(m) = Mat::Identity(m, m);
    const Mat d = height_jacobian(x);
    if (d.rows() != k || d.cols() != m)
      throw InvalidParams("height jacobian returned the wrong shape");
    j.bottomRows(k) = d;
    return j;
  };
  data.charts.push_back(std::move(chart));
  data.sampler.windows.push_back(window ? *window : domain);
  data.jacobian_bound = jacobian_bound;
  double extent = 0.0;
  for (int d = 0; d < m; ++d) extent = std::max(extent, domain.hi(d) - domain.lo(d));
  data.length_scale = std::min(1.0, extent);
  return ParamImmersion(std::move(data));
}

ParamImmersion make_wiggle(double eps, double delta, double window, double margin) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidParams("wiggle needs eps >= 0");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidParams("wiggle needs delta > 0");
  if (!(window > 0.0)) throw InvalidParams("wiggle needs window > 0");
  if (!(margin >= 0.0)) throw InvalidParams("wiggle needs margin >= 0");
  ParamImmersion::Data data;
  data.name = "wiggle";
  data.params = {{"eps", eps}, {"delta", delta}, {"window", window}, {"margin", margin}};
  data.m = 1;
  data.n = 2;
  const double omega = 2.0 * pi / delta;
  Chart chart;
  const double half = 0.5 * window + margin;
  chart.domain = make_box(1, -half, half);
  chart.eval = [eps, omega](const Vec& t) -> Vec {
    return Vec{{t(0), eps * std::sin(omega * t(0))}};
  };
  chart.jacobian = [eps, omega](const Vec& t) -> Mat {
    Mat j(2, 1);
    j << 1.0, eps * omega * std::cos(omega * t(0));
    return j;
  };
  data.charts.push_back(std::move(chart));
  data.sampler.windows.push_back(make_box(1, -0.5 * window, 0.5 * window));
  data.jacobian_bound = std::sqrt(1.0 + (eps * omega) * (eps * omega));
  data.length_scale = 1.0;
  return ParamImmersion(std::move(data));
}

}  // namespace tangraph
