#include "iceline/filippov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "iceline/numerics.hpp"

namespace iceline::filippov {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

double time_floor(double t) { return std::max(1e-14, 8.0 * kEps * std::abs(t)); }

std::string at_time(double t) {
  std::ostringstream os;
  os << " at t=" << t;
  return os.str();
}

}  // namespace

void IntegratorConfig::validate() const {
  const bool positive = rel_tol > 0.0 && abs_tol > 0.0 && boundary_tol > 0.0 &&
                        tangency_tol > 0.0 && max_step > 0.0 &&
                        max_slide_time > 0.0;
  if (!positive)
    throw PreconditionError(
        "IntegratorConfig: tolerances and limits must be positive");
  if (boundary_tol > 10.0 * abs_tol)
    throw PreconditionError(
        "IntegratorConfig: boundary_tol must not exceed 10*abs_tol");
}

RegionLabel classify_region(const PlanarState& state,
                            const IntegratorConfig& cfg) {
  if (!std::isfinite(state.x) || !std::isfinite(state.y) ||
      !std::isfinite(state.t))
    throw InvalidStateError("classify_region: non-finite state");
  const double b = cfg.boundary_tol;
  if (state.y > 1.0 + b) return RegionLabel::Above;
  if (state.y >= 1.0 - b) return RegionLabel::UpperBoundary;
  if (state.y > b) return RegionLabel::Interior;
  if (state.y >= -b) return RegionLabel::LowerBoundary;
  return RegionLabel::Below;
}

Eigen::Vector2d extended_field(const SmoothField& field,
                               const PlanarState& state,
                               const IntegratorConfig& cfg) {
  const RegionLabel region = classify_region(state, cfg);
  const double g = field.G(state.x, state.y);
  const double h = field.H(state.x, state.y);
  if (!std::isfinite(g) || !std::isfinite(h))
    throw InvalidStateError("extended_field: field returned non-finite value");
  switch (region) {
    case RegionLabel::Above:
      return {g, -std::abs(h)};
    case RegionLabel::UpperBoundary:
      return {g, 0.5 * (h - std::abs(h))};
    case RegionLabel::Interior:
      return {g, h};
    case RegionLabel::LowerBoundary:
      return {g, 0.5 * (h + std::abs(h))};
    case RegionLabel::Below:
      return {g, std::abs(h)};
  }
  return {g, h};  // unreachable
}

BoundaryMode boundary_mode(const SmoothField& field, double x,
                           BoundarySide side, const IntegratorConfig& cfg) {
  if (!std::isfinite(x)) throw InvalidStateError("boundary_mode: non-finite x");
  const double h = field.H(x, boundary_value(side));
  if (!std::isfinite(h))
    throw InvalidStateError("boundary_mode: field returned non-finite value");
  // Attracting means the inner field pushes into the boundary.
  const double inward = (side == BoundarySide::Lower) ? -h : h;
  if (inward > cfg.tangency_tol) return BoundaryMode::AttractingSliding;
  if (inward < -cfg.tangency_tol) return BoundaryMode::Crossing;
  return BoundaryMode::Tangency;
}

Eigen::Vector2d sliding_field(const SmoothField& field, double x,
                              BoundarySide side, const IntegratorConfig& cfg) {
  if (boundary_mode(field, x, side, cfg) != BoundaryMode::AttractingSliding)
    throw ModeViolationError("sliding_field: point is not attracting-sliding");
  return {field.G(x, boundary_value(side)), 0.0};
}

double sliding_weight(const SmoothField& field, double x, BoundarySide side,
                      const IntegratorConfig& cfg) {
  if (boundary_mode(field, x, side, cfg) != BoundaryMode::AttractingSliding)
    throw ModeViolationError("sliding_weight: point is not attracting-sliding");
  const double h = field.H(x, boundary_value(side));
  const double outer = (side == BoundarySide::Lower) ? std::abs(h) : -std::abs(h);
  return h / (h - outer);  // equals 1/2 exactly at an attracting point
}

namespace {

// ---- Dormand-Prince 5(4) tableau ----
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

using Vec2 = Eigen::Vector2d;
using Rhs = std::function<Vec2(double, const Vec2&)>;

// Quartic continuous extension of one accepted step; exact at both ends.
struct DenseSeg {
  double t0 = 0.0, h = 0.0;
  Vec2 r1{0, 0}, r2{0, 0}, r3{0, 0}, r4{0, 0}, r5{0, 0};

  Vec2 eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
  double eval_y(double t) const { return eval(t).y(); }
};

struct Accepted {
  double t1 = 0.0;
  Vec2 y1{0, 0};
  Vec2 k7{0, 0};  // FSAL derivative at t1
  DenseSeg dense;
};

class Dopri5 {
 public:
  Dopri5(const IntegratorConfig& cfg) : cfg_(cfg) {}

  void reset(double t, const Vec2& y) {
    have_k1_ = false;
    h_ = 0.0;
    t_ = t;
    y_ = y;
  }

  void adopt(const Accepted& acc) {  // continue from a full accepted step
    t_ = acc.t1;
    y_ = acc.y1;
    k1_ = acc.k7;
    have_k1_ = true;
  }

  void adopt_cut(double t, const Vec2& y) {  // continue from a cut point
    t_ = t;
    y_ = y;
    have_k1_ = false;
  }

  double t() const { return t_; }
  const Vec2& y() const { return y_; }

  // One error-controlled step of at most h_cap.  Throws StiffnessError on
  // step-size underflow.
  Accepted step(const Rhs& f, double h_cap) {
    if (!have_k1_) {
      k1_ = eval(f, t_, y_);
      have_k1_ = true;
    }
    if (h_ <= 0.0) h_ = initial_step(f, h_cap);
    double h = std::min(h_, h_cap);
    for (int tries = 0;; ++tries) {
      if (h < time_floor(t_) || tries > 200)
        throw StiffnessError("step size underflow" + at_time(t_));
      const Vec2 k2 = eval(f, t_ + c2 * h, y_ + h * (a21 * k1_));
      const Vec2 k3 = eval(f, t_ + c3 * h, y_ + h * (a31 * k1_ + a32 * k2));
      const Vec2 k4 =
          eval(f, t_ + c4 * h, y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
      const Vec2 k5 = eval(f, t_ + c5 * h,
                           y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec2 k6 = eval(
          f, t_ + h, y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec2 y1 =
          y_ + h * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Vec2 k7 = eval(f, t_ + h, y1);
      const Vec2 err_vec =
          h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double sc = cfg_.abs_tol +
                          cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
        const double r = err_vec[i] / sc;
        err += r * r;
      }
      err = std::sqrt(0.5 * err);

      if (!(err <= 1.0) || !y1.allFinite()) {  // reject (NaN-safe)
        const double shrink =
            std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5)
                               : 0.1;
        h *= shrink;
        continue;
      }

      Accepted acc;
      acc.t1 = t_ + h;
      acc.y1 = y1;
      acc.k7 = k7;
      acc.dense.t0 = t_;
      acc.dense.h = h;
      const Vec2 dy = y1 - y_;
      acc.dense.r1 = y_;
      acc.dense.r2 = dy;
      acc.dense.r3 = h * k1_ - dy;
      acc.dense.r4 = dy - h * k7 - acc.dense.r3;
      acc.dense.r5 = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 +
                          d7 * k7);

      const double grow =
          (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h_ = std::min(h * grow, cfg_.max_step);
      return acc;
    }
  }

 private:
  Vec2 eval(const Rhs& f, double t, const Vec2& y) const {
    const Vec2 v = f(t, y);
    if (!v.allFinite())
      throw InvalidStateError("field returned non-finite value" + at_time(t));
    return v;
  }

  double initial_step(const Rhs& f, double h_cap) const {
    const double cap = std::min(h_cap, cfg_.max_step);
    Vec2 sc;
    for (int i = 0; i < 2; ++i)
      sc[i] = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[i]);
    const double d0 = (y_.array() / sc.array()).matrix().norm();
    const double d1n = (k1_.array() / sc.array()).matrix().norm();
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, cap);
    const Vec2 f1 = eval(f, t_ + h0, y_ + h0 * k1_);
    const double d2 = ((f1 - k1_).array() / sc.array()).matrix().norm() / h0;
    const double dm = std::max(d1n, d2);
    const double h1 =
        (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::max(std::min({100.0 * h0, h1, cap}), time_floor(t_));
  }

  IntegratorConfig cfg_;
  double t_ = 0.0, h_ = 0.0;
  Vec2 y_{0, 0};
  Vec2 k1_{0, 0};
  bool have_k1_ = false;
};

// Earliest root of dense_y - level in [ta, tb].  When the segment starts
// already inside the tolerance band around the level (departing a boundary),
// crossings are counted only after the first checkpoint clear of the band.
std::optional<double> first_level_root(const DenseSeg& dense, double ta,
                                       double tb, double level,
                                       double band) {
  constexpr int kChecks = 16;
  double ts[kChecks + 1], vs[kChecks + 1];
  for (int i = 0; i <= kChecks; ++i) {
    ts[i] = (i == kChecks) ? tb : ta + (tb - ta) * (double(i) / kChecks);
    vs[i] = dense.eval_y(ts[i]) - level;
  }
  int i0 = 0;
  if (std::abs(vs[0]) <= band) {
    while (i0 <= kChecks && std::abs(vs[i0]) <= band) ++i0;
    if (i0 > kChecks) return std::nullopt;  // hovering inside the band
  }
  const auto f = [&](double t) { return dense.eval_y(t) - level; };
  for (int i = i0; i < kChecks; ++i) {
    if (vs[i] == 0.0) return ts[i];
    if ((vs[i] > 0.0) != (vs[i + 1] > 0.0))
      return numerics::brent_root(f, ts[i], ts[i + 1], vs[i], vs[i + 1]);
  }
  return std::nullopt;
}

// Upward crossings of dense_y through the section level, strictly inside.
std::vector<double> upward_section_roots(const DenseSeg& dense, double ta,
                                         double tb, double level) {
  constexpr int kChecks = 16;
  std::vector<double> roots;
  const auto f = [&](double t) { return dense.eval_y(t) - level; };
  double tprev = ta, vprev = f(ta);
  for (int i = 1; i <= kChecks; ++i) {
    const double t = (i == kChecks) ? tb : ta + (tb - ta) * (double(i) / kChecks);
    const double v = f(t);
    if (vprev < 0.0 && v >= 0.0) {
      roots.push_back(v == 0.0 ? t
                               : numerics::brent_root(f, tprev, t, vprev, v));
    }
    tprev = t;
    vprev = v;
  }
  return roots;
}

enum class Branch { Above, Inner, Below };

class Stepper {
 public:
  Stepper(const SmoothField& field, const PlanarState& ic,
          const IntegratorConfig& cfg)
      : field_(field), cfg_(cfg), s_(ic), rk_(cfg) {
    settle();
  }

  const PlanarState& state() const { return s_; }

  std::vector<Event> take_pending_events() { return std::move(pending_); }

  struct Segment {
    double t0 = 0.0, t1 = 0.0;
    Mode mode = Mode::Interior;  // mode over [t0, t1)
    DenseSeg dense;
    std::vector<Event> events;

    PlanarState at(double t) const {
      const Vec2 z = dense.eval(t);
      return {z.x(), z.y(), t, mode};
    }
  };

  // One accepted (possibly boundary-cut) step, not beyond t_limit.
  std::optional<Segment> advance(double t_limit,
                                 std::optional<double> section_y) {
    if (t_limit - s_.t <= time_floor(s_.t)) return std::nullopt;
    return (s_.mode == Mode::Interior) ? advance_interior(t_limit, section_y)
                                       : advance_slide(t_limit);
  }

 private:
  static Mode slide_mode(BoundarySide side) {
    return side == BoundarySide::Lower ? Mode::SlideLower : Mode::SlideUpper;
  }

  bool suppressed(BoundarySide side) const {
    return suppressed_ && *suppressed_ == side;
  }

  Branch branch_of(double y) const {
    if (y > 1.0 + cfg_.boundary_tol) return Branch::Above;
    if (y < -cfg_.boundary_tol) return Branch::Below;
    return Branch::Inner;  // boundary-adjacent states step with the inner field
  }

  Rhs make_rhs(Branch br) const {
    switch (br) {
      case Branch::Above:
        return [this](double, const Vec2& z) -> Vec2 {
          return {field_.G(z.x(), z.y()), -std::abs(field_.H(z.x(), z.y()))};
        };
      case Branch::Below:
        return [this](double, const Vec2& z) -> Vec2 {
          return {field_.G(z.x(), z.y()), std::abs(field_.H(z.x(), z.y()))};
        };
      case Branch::Inner:
      default:
        return [this](double, const Vec2& z) -> Vec2 {
          return {field_.G(z.x(), z.y()), field_.H(z.x(), z.y())};
        };
    }
  }

  // Initial-state resolution: snap onto a boundary and start sliding when the
  // field demands it; reject states that cannot move.
  void settle() {
    if (!std::isfinite(s_.x) || !std::isfinite(s_.y) || !std::isfinite(s_.t))
      throw InvalidStateError("integrate: non-finite initial state");
    if (s_.mode != Mode::Interior) {
      const double yb =
          boundary_value(s_.mode == Mode::SlideLower ? BoundarySide::Lower
                                                     : BoundarySide::Upper);
      if (std::abs(s_.y - yb) > cfg_.boundary_tol)
        throw InvalidStateError("integrate: sliding state is off its boundary");
      s_.y = yb;
      slide_start_ = s_.t;
      rk_.reset(s_.t, {s_.x, s_.y});
      return;
    }
    for (const BoundarySide side : {BoundarySide::Lower, BoundarySide::Upper}) {
      const double yb = boundary_value(side);
      if (std::abs(s_.y - yb) > cfg_.boundary_tol || suppressed(side)) continue;
      const BoundaryMode bm = boundary_mode(field_, s_.x, side, cfg_);
      if (bm == BoundaryMode::AttractingSliding) {
        s_.y = yb;
        s_.mode = slide_mode(side);
        slide_start_ = s_.t;
        pending_.push_back({EventKind::SlidingEntry, s_.t, s_});
      } else if (bm == BoundaryMode::Tangency) {
        // Flat-zero H in a neighborhood means no transverse escape exists.
        const double dx = 1e-6 * (1.0 + std::abs(s_.x));
        if (std::abs(field_.H(s_.x - dx, yb)) <= cfg_.tangency_tol &&
            std::abs(field_.H(s_.x + dx, yb)) <= cfg_.tangency_tol)
          throw DegenerateBoundaryError(
              "integrate: start at a degenerate boundary tangency" +
              at_time(s_.t));
      }
      break;  // a state is within tolerance of at most one boundary
    }
    rk_.reset(s_.t, {s_.x, s_.y});
  }

  std::optional<Segment> advance_interior(double t_limit,
                                          std::optional<double> section_y) {
    const Branch br = branch_of(s_.y);
    const Rhs rhs = make_rhs(br);
    const Accepted acc = rk_.step(rhs, t_limit - s_.t);

    Segment seg;
    seg.t0 = s_.t;
    seg.mode = Mode::Interior;
    seg.dense = acc.dense;

    // Earliest boundary contact inside the step, if any.
    std::optional<double> t_hit;
    std::optional<BoundarySide> hit_side;
    for (const BoundarySide side : {BoundarySide::Lower, BoundarySide::Upper}) {
      if (suppressed(side)) continue;
      if (br == Branch::Above && side == BoundarySide::Lower) continue;
      if (br == Branch::Below && side == BoundarySide::Upper) continue;
      const auto root = first_level_root(acc.dense, seg.t0, acc.t1,
                                         boundary_value(side),
                                         cfg_.boundary_tol);
      if (root && (!t_hit || *root < *t_hit)) {
        t_hit = root;
        hit_side = side;
      }
    }

    double t_end = acc.t1;
    if (t_hit) t_end = *t_hit;
    seg.t1 = t_end;

    if (section_y) {
      for (const double tr : upward_section_roots(acc.dense, seg.t0, t_end,
                                                  *section_y)) {
        if (tr <= seg.t0 || tr > t_end) continue;
        const Vec2 z = acc.dense.eval(tr);
        seg.events.push_back(
            {EventKind::SectionCross, tr, {z.x(), *section_y, tr, Mode::Interior}});
      }
    }

    if (t_hit) {
      const BoundarySide side = *hit_side;
      const double yb = boundary_value(side);
      const Vec2 z = acc.dense.eval(*t_hit);
      s_ = {z.x(), yb, *t_hit, Mode::Interior};
      seg.events.push_back({EventKind::BoundaryHit, s_.t, s_});
      const BoundaryMode bm = boundary_mode(field_, s_.x, side, cfg_);
      if (bm == BoundaryMode::AttractingSliding) {
        s_.mode = slide_mode(side);
        slide_start_ = s_.t;
        seg.events.push_back({EventKind::SlidingEntry, s_.t, s_});
      } else if (bm == BoundaryMode::Tangency) {
        seg.events.push_back({EventKind::TangencyCross, s_.t, s_});
      }
      rk_.adopt_cut(s_.t, {s_.x, s_.y});
    } else {
      s_ = {acc.y1.x(), acc.y1.y(), acc.t1, Mode::Interior};
      rk_.adopt(acc);
    }

    if (suppressed_ &&
        std::abs(s_.y - boundary_value(*suppressed_)) > 2.0 * cfg_.boundary_tol)
      suppressed_.reset();
    return seg;
  }

  std::optional<Segment> advance_slide(double t_limit) {
    const BoundarySide side =
        s_.mode == Mode::SlideLower ? BoundarySide::Lower : BoundarySide::Upper;
    const double yb = boundary_value(side);
    const Rhs rhs = [this, yb](double, const Vec2& z) -> Vec2 {
      return {field_.G(z.x(), yb), 0.0};
    };
    const Accepted acc = rk_.step(rhs, t_limit - s_.t);

    Segment seg;
    seg.t0 = s_.t;
    seg.t1 = acc.t1;
    seg.mode = s_.mode;
    seg.dense = acc.dense;

    // Release at the tangency: first zero of H along the slide.
    const auto psi = [&](double t) {
      return field_.H(acc.dense.eval(t).x(), yb);
    };
    constexpr int kChecks = 16;
    std::optional<double> t_exit;
    double tprev = seg.t0, vprev = psi(tprev);
    const double release = (side == BoundarySide::Lower) ? 1.0 : -1.0;
    for (int i = 1; i <= kChecks; ++i) {
      const double t =
          (i == kChecks) ? acc.t1 : seg.t0 + (acc.t1 - seg.t0) * (double(i) / kChecks);
      const double v = psi(t);
      if (vprev * release < 0.0 && v * release >= 0.0) {
        t_exit = (v == 0.0) ? t : numerics::brent_root(psi, tprev, t, vprev, v);
        break;
      }
      tprev = t;
      vprev = v;
    }

    if (t_exit) {
      seg.t1 = *t_exit;
      const Vec2 z = acc.dense.eval(*t_exit);
      s_ = {z.x(), yb, *t_exit, Mode::Interior};
      seg.events.push_back({EventKind::SlidingExit, s_.t, s_});
      suppressed_ = side;
      rk_.adopt_cut(s_.t, {s_.x, s_.y});
      return seg;
    }

    if (seg.t1 - slide_start_ > cfg_.max_slide_time)
      throw RunawaySlideError("sliding exceeded max_slide_time" +
                              at_time(seg.t1));
    s_ = {acc.y1.x(), yb, acc.t1, s_.mode};
    rk_.adopt(acc);
    return seg;
  }

  const SmoothField& field_;
  IntegratorConfig cfg_;
  PlanarState s_;
  Dopri5 rk_;
  double slide_start_ = 0.0;
  std::optional<BoundarySide> suppressed_;  // re-entry guard after an exit
  std::vector<Event> pending_;
};

}  // namespace

std::pair<PlanarState, std::vector<Event>> step(const SmoothField& field,
                                                const PlanarState& state,
                                                const IntegratorConfig& cfg) {
  cfg.validate();
  Stepper st(field, state, cfg);
  std::vector<Event> events = st.take_pending_events();
  if (auto seg = st.advance(kInf, std::nullopt))
    events.insert(events.end(), seg->events.begin(), seg->events.end());
  return {st.state(), std::move(events)};
}

Trajectory integrate(const SmoothField& field, const PlanarState& ic,
                     double t_max, const IntegratorConfig& cfg,
                     const IntegrateOptions& opts) {
  cfg.validate();
  if (!(opts.dt_out > 0.0))
    throw PreconditionError("integrate: dt_out must be positive");
  if (!std::isfinite(t_max) || t_max < ic.t)
    throw PreconditionError("integrate: t_max must not precede the start time");

  Trajectory traj;
  traj.dt_out = opts.dt_out;

  auto run = [&]() {
    Stepper st(field, ic, cfg);
    for (Event& e : st.take_pending_events()) traj.events.push_back(e);
    traj.samples.push_back(st.state());

    long k = 1;
    double next_grid = ic.t + opts.dt_out;
    while (true) {
      auto seg = st.advance(t_max, opts.section_y);
      if (!seg) break;

      std::vector<PlanarState> pts;
      while (next_grid <= seg->t1 && next_grid < t_max) {
        pts.push_back(next_grid < seg->t1 ? seg->at(next_grid) : st.state());
        ++k;
        next_grid = ic.t + k * opts.dt_out;
      }
      for (const Event& e : seg->events) {
        traj.events.push_back(e);
        pts.push_back(e.state);
      }
      std::stable_sort(pts.begin(), pts.end(),
                       [](const PlanarState& a, const PlanarState& b) {
                         return a.t < b.t;
                       });
      for (const PlanarState& p : pts) {
        if (!traj.samples.empty() && traj.samples.back().t == p.t &&
            traj.samples.back().mode == p.mode)
          traj.samples.back() = p;  // event state supersedes the grid sample
        else
          traj.samples.push_back(p);
      }
    }
    if (traj.samples.back().t < t_max) {
      PlanarState fin = st.state();
      fin.t = t_max;  // advance() stops within one time floor of t_max
      traj.samples.push_back(fin);
    }
  };

  try {
    run();
  } catch (const StiffnessError& e) {
    const double t = traj.samples.empty() ? ic.t : traj.samples.back().t;
    throw IntegrationAbort(IntegrationAbort::Kind::Stiffness, t,
                           std::move(traj), e.what());
  } catch (const RunawaySlideError& e) {
    const double t = traj.samples.empty() ? ic.t : traj.samples.back().t;
    throw IntegrationAbort(IntegrationAbort::Kind::RunawaySlide, t,
                           std::move(traj), e.what());
  } catch (const DegenerateBoundaryError& e) {
    const double t = traj.samples.empty() ? ic.t : traj.samples.back().t;
    throw IntegrationAbort(IntegrationAbort::Kind::DegenerateBoundary, t,
                           std::move(traj), e.what());
  }
  return traj;
}

double one_sided_lipschitz_estimate(const SmoothField& field,
                                    const Eigen::AlignedBox2d& box,
                                    int n_samples, std::uint64_t seed,
                                    const IntegratorConfig& cfg) {
  cfg.validate();
  if (box.isEmpty() || !(box.sizes().x() > 0.0) || !(box.sizes().y() > 0.0))
    throw InvalidDomainError(
        "one_sided_lipschitz_estimate: box must have positive extent");
  if (n_samples < 1)
    throw PreconditionError(
        "one_sided_lipschitz_estimate: need at least one sample pair");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(box.min().x(), box.max().x());
  std::uniform_real_distribution<double> uy(box.min().y(), box.max().y());

  double worst = -kInf;
  for (int i = 0; i < n_samples; ++i) {
    const Eigen::Vector2d z1(ux(rng), uy(rng));
    const Eigen::Vector2d z2(ux(rng), uy(rng));
    const Eigen::Vector2d dz = z1 - z2;
    const double n2 = dz.squaredNorm();
    if (n2 == 0.0) continue;
    const Eigen::Vector2d f1 =
        extended_field(field, {z1.x(), z1.y(), 0.0, Mode::Interior}, cfg);
    const Eigen::Vector2d f2 =
        extended_field(field, {z2.x(), z2.y(), 0.0, Mode::Interior}, cfg);
    worst = std::max(worst, (f1 - f2).dot(dz) / n2);
  }
  return worst;
}

}  // namespace iceline::filippov
