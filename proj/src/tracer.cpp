#include "fluxvol/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

namespace fluxvol {

namespace {

// Dormand-Prince 5(4) tableau and Hairer's dense-output weights.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

Vec3 axpy(const Vec3& y, double h, std::initializer_list<std::pair<double, const Vec3*>> terms) {
  Vec3 out = y;
  for (const auto& [c, k] : terms) {
    for (int i = 0; i < 3; ++i) out[i] += h * c * (*k)[i];
  }
  return out;
}

double error_scale(double a, double b, const TracerOptions& o) {
  // Unwrapped angles grow without bound; cap the relative part at one turn.
  const double mag = std::min(std::max(std::abs(a), std::abs(b)), kTwoPi);
  return o.abs_tol + o.rel_tol * mag;
}

double default_horizon(const FieldModel& field, FlowField flow, int multiplicity) {
  const double base = field.axis_return_estimate(flow != FlowField::B);
  return 100.0 * base * std::max(1, multiplicity);
}

}  // namespace

Trajectory::Trajectory(const FieldModel& field, FlowField flow, const Vec3& x0,
                       TracerOptions opts)
    : field_(&field), flow_(flow), x0_(x0), opts_(opts), x_(x0) {
  if (!(opts_.rel_tol > 0.0) || !(opts_.abs_tol > 0.0)) {
    throw std::invalid_argument("tracer tolerances must be positive");
  }
  max_time_ = opts_.max_time > 0.0 ? opts_.max_time : default_horizon(field, flow, 1);
  k1_ = rhs(x_);
  h_ = initial_step();
}

Vec3 Trajectory::rhs(const Vec3& x) const {
  switch (flow_) {
    case FlowField::B:
      return field_->b_contra(x);
    case FlowField::V:
      return field_->v_contra(x);
    case FlowField::U:
      return field_->u_contra(x);
  }
  return {};
}

double Trajectory::initial_step() const {
  double d0 = 0.0, d1n = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double sc = error_scale(x_[i], x_[i], opts_);
    d0 += std::pow(x_[i] / sc, 2);
    d1n += std::pow(k1_[i] / sc, 2);
  }
  d0 = std::sqrt(d0 / 3.0);
  d1n = std::sqrt(d1n / 3.0);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, opts_.max_step);
  const Vec3 y1 = axpy(x_, h0, {{1.0, &k1_}});
  const Vec3 f1 = rhs(y1);
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double sc = error_scale(x_[i], x_[i], opts_);
    d2 += std::pow((f1[i] - k1_[i]) / sc, 2);
  }
  d2 = std::sqrt(d2 / 3.0) / h0;
  const double dm = std::max(d1n, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, opts_.max_step});
}

bool Trajectory::step() {
  if (t_ >= max_time_) return false;
  constexpr int kMaxRejections = 60;
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    double h = std::min(h_, max_time_ - t_);
    if (h <= 1e-14 * std::max(1.0, std::abs(t_))) {
      throw TraceError("step size underflow at t=" + std::to_string(t_));
    }
    const Vec3& k1 = k1_;
    const Vec3 k2 = rhs(axpy(x_, h, {{a21, &k1}}));
    const Vec3 k3 = rhs(axpy(x_, h, {{a31, &k1}, {a32, &k2}}));
    const Vec3 k4 = rhs(axpy(x_, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec3 k5 = rhs(axpy(x_, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec3 k6 =
        rhs(axpy(x_, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec3 y1 =
        axpy(x_, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const Vec3 k7 = rhs(y1);

    double err = 0.0;
    bool finite = true;
    for (int i = 0; i < 3; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err += std::pow(e / error_scale(x_[i], y1[i], opts_), 2);
      finite = finite && std::isfinite(y1[i]);
    }
    err = std::sqrt(err / 3.0);
    if (!finite || !std::isfinite(err)) {
      h_ = 0.25 * h;
      continue;
    }
    if (err > 1.0) {
      h_ = h * std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    Segment seg;
    seg.t0 = t_;
    seg.h = h;
    for (int i = 0; i < 3; ++i) {
      const double ydiff = y1[i] - x_[i];
      const double bspl = h * k1[i] - ydiff;
      seg.coeff[0][i] = x_[i];
      seg.coeff[1][i] = ydiff;
      seg.coeff[2][i] = bspl;
      seg.coeff[3][i] = ydiff - h * k7[i] - bspl;
      seg.coeff[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                             d6 * k6[i] + d7 * k7[i]);
    }
    segments_.push_back(seg);

    t_ += h;
    x_ = y1;
    k1_ = k7;
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h_ = std::min(h * fac, opts_.max_step);
    return true;
  }
  throw TraceError("too many rejected steps at t=" + std::to_string(t_));
}

void Trajectory::extend_to(double t) {
  while (t_ < t) {
    if (!step()) {
      throw TraceTimeout("time horizon " + std::to_string(max_time_) + " reached");
    }
  }
}

Vec3 Trajectory::state(double t) const {
  if (segments_.empty() || t <= 0.0) return x0_;
  if (t >= t_) return x_;
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double value, const Segment& s) { return value < s.t0; });
  const Segment& s = *std::prev(it);
  const double theta = (t - s.t0) / s.h;
  const double theta1 = 1.0 - theta;
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    out[i] = s.coeff[0][i] +
             theta * (s.coeff[1][i] +
                      theta1 * (s.coeff[2][i] +
                                theta * (s.coeff[3][i] + theta1 * s.coeff[4][i])));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<CrossingEvent> find_phase_crossings(Trajectory& traj,
                                                const PhaseFunction& phase,
                                                double spacing,
                                                const CrossingPredicate& done,
                                                bool monotone) {
  std::vector<CrossingEvent> events;
  double prev_t = 0.0;
  double prev_phase = phase(traj.start(), 0.0);
  int direction = 0;
  const int samples = std::max(1, traj.options().scan_samples);
  std::size_t scanned = 0;

  auto refine = [&](double ta, double tb, double near, double level) {
    auto g = [&](double t) { return phase(traj.state(t), near) - level; };
    const double gb = g(tb);
    if (gb == 0.0) return tb;
    const double ga = g(ta);
    if (ga == 0.0) return ta;
    std::uintmax_t iters = 200;
    boost::math::tools::eps_tolerance<double> tol(50);
    const auto [lo, hi] = boost::math::tools::toms748_solve(g, ta, tb, ga, gb, tol, iters);
    return 0.5 * (lo + hi);
  };

  // Levels crossed when the phase moves from `from` to `to`; a level equal
  // to `from` was already reported (or is the start point).
  auto scan_interval = [&](double ta, double pa, double tb, double pb) {
    std::vector<std::pair<double, double>> found;  // (t, level)
    const double lo = std::min(pa, pb);
    const double hi = std::max(pa, pb);
    for (double k = std::ceil(lo / spacing); k * spacing <= hi; k += 1.0) {
      const double level = k * spacing;
      const bool crosses = pb > pa ? (level > pa && level <= pb) : (level < pa && level >= pb);
      if (crosses) found.emplace_back(refine(ta, tb, pa, level), level);
    }
    std::sort(found.begin(), found.end());
    return found;
  };

  while (true) {
    for (; scanned < traj.step_count(); ++scanned) {
      const auto [t0, t1] = traj.step_interval(scanned);
      for (int s = 1; s <= samples; ++s) {
        const double t = (s == samples) ? t1 : t0 + (t1 - t0) * s / samples;
        const double ph = phase(traj.state(t), prev_phase);
        const double delta = ph - prev_phase;
        if (monotone && std::abs(delta) > 1e-12) {
          const int sgn = delta > 0 ? 1 : -1;
          if (direction == 0) direction = sgn;
          if (sgn != direction) {
            throw TraceError("section angle is not monotone along the field line");
          }
        }
        for (const auto& [tc, level] : scan_interval(prev_t, prev_phase, t, ph)) {
          CrossingEvent ev;
          ev.t = tc;
          ev.point = traj.state(tc);
          ev.index = static_cast<int>(events.size()) + 1;
          events.push_back(ev);
          if (done(events)) return events;
        }
        prev_t = t;
        prev_phase = ph;
      }
    }
    if (!traj.step()) {
      throw TraceTimeout("time horizon " + std::to_string(traj.max_time()) +
                         " reached after " + std::to_string(events.size()) +
                         " crossings");
    }
  }
}

std::vector<CrossingEvent> return_to_section(const FieldModel& field, FlowField flow,
                                             const Vec3& x0, Section section, int count,
                                             TracerOptions opts) {
  if (count < 1) throw std::invalid_argument("return_to_section: count must be >= 1");
  if (opts.max_time <= 0.0) opts.max_time = default_horizon(field, flow, count);
  Trajectory traj(field, flow, x0, opts);
  PhaseFunction phase;
  if (section == Section::ToroidalPlane) {
    const int ti = field.toroidal_index();
    phase = [ti, x0](const Vec3& x, double) { return x[ti] - x0[ti]; };
  } else if (field.chart() == Chart::Cylindrical) {
    phase = [&field, x0](const Vec3& x, double near) {
      return field.uline_phase(x, x0, near);
    };
  } else {
    phase = [x0](const Vec3& x, double) { return x[1] - x0[1]; };
  }
  auto done = [count](std::vector<CrossingEvent>& ev) {
    return static_cast<int>(ev.size()) >= count;
  };
  return find_phase_crossings(traj, phase, kTwoPi, done, /*monotone=*/true);
}

double transit_time(const FieldModel& field, const Vec3& x0, TracerOptions opts) {
  return return_to_section(field, FlowField::B, x0, Section::ToroidalPlane, 1, opts)
      .front()
      .t;
}

std::vector<CrossingEvent> uline_crossings(const FieldModel& field, FlowField flow,
                                           const Vec3& x0, int n_valid,
                                           const UlineOptions& uopts, TracerOptions opts) {
  if (flow == FlowField::U) {
    throw std::invalid_argument("u-line returns need the B or B/rho flow");
  }
  const int wanted = uopts.filter_valid ? n_valid : uopts.count_required;
  if (wanted < 1) throw std::invalid_argument("u-line returns: count must be >= 1");
  if (opts.max_time <= 0.0) opts.max_time = default_horizon(field, flow, wanted);

  const double m0 = field.uline_match_coordinate(x0);
  const double tol = uopts.match_tol > 0.0 ? uopts.match_tol
                                           : 1e-6 * std::max(1.0, std::abs(m0));
  Trajectory traj(field, flow, x0, opts);
  PhaseFunction phase = [&field, x0](const Vec3& x, double near) {
    return field.uline_phase(x, x0, near);
  };
  int valid_count = 0;
  std::size_t classified = 0;
  auto done = [&](std::vector<CrossingEvent>& ev) {
    for (; classified < ev.size(); ++classified) {
      auto& e = ev[classified];
      e.valid = std::abs(field.uline_match_coordinate(e.point) - m0) <= tol;
      if (e.valid) ++valid_count;
    }
    if (uopts.filter_valid) return valid_count >= n_valid;
    return static_cast<int>(ev.size()) >= uopts.count_required;
  };
  return find_phase_crossings(traj, phase, kTwoPi, done);
}

CrossingEvent return_to_uline(const FieldModel& field, FlowField flow, const Vec3& x0,
                              const UlineOptions& uopts, TracerOptions opts) {
  const auto events = uline_crossings(field, flow, x0, 1, uopts, opts);
  if (!uopts.filter_valid) return events.back();
  for (const auto& e : events) {
    if (e.valid) return e;
  }
  throw TraceError("no valid u-line return found");
}

double mean_return_time(const FieldModel& field, FlowField flow, const Vec3& x0, int n,
                        const UlineOptions& uopts, TracerOptions opts) {
  UlineOptions filtered = uopts;
  filtered.filter_valid = true;
  const auto events = uline_crossings(field, flow, x0, n, filtered, opts);
  // Mean of successive return intervals = time of the n-th valid return / n.
  int seen = 0;
  for (const auto& e : events) {
    if (e.valid && ++seen == n) return e.t / n;
  }
  throw TraceError("mean_return_time: not enough valid returns");
}

}  // namespace fluxvol
