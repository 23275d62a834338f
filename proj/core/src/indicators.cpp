#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pedsafe/error.hpp"
#include "pedsafe/safety.hpp"

namespace pedsafe::safety {

namespace {

// Motion of one agent along its heading with a stop clamp.
struct Mover {
  Vec2 p;
  Vec2 u;
  double s;
  double a;
  double t_stop;

  explicit Mover(const world::AgentSample& x)
      : p(x.position()), u(unit_heading(x.heading)), s(x.speed), a(x.accel),
        t_stop(x.accel < 0.0 ? x.speed / -x.accel : std::numeric_limits<double>::infinity()) {}

  Vec2 position(double t) const {
    const double tt = std::min(t, t_stop);
    return p + u * (s * tt + 0.5 * a * tt * tt);
  }
  Vec2 velocity(double t) const { return t < t_stop ? Vec2(u * (s + a * t)) : Vec2::Zero(); }
  Vec2 acceleration(double t) const { return t < t_stop ? Vec2(u * a) : Vec2::Zero(); }
};

// Relative offset A + B x + C x^2 on one smooth piece; returns the x in
// [0, len] minimizing |offset| (earliest on ties) and its distance.
ClosestApproach minimize_piece(const Vec2& A, const Vec2& B, const Vec2& C, double len) {
  auto dist2 = [&](double x) { return (A + B * x + C * (x * x)).squaredNorm(); };
  // derivative of dist2 / 2
  const double c3 = 2.0 * C.squaredNorm();
  const double c2 = 3.0 * B.dot(C);
  const double c1 = B.squaredNorm() + 2.0 * A.dot(C);
  const double c0 = A.dot(B);
  auto g = [&](double x) { return ((c3 * x + c2) * x + c1) * x + c0; };

  std::vector<double> cuts{0.0, len};
  // stationary points of g split [0, len] into monotone runs
  if (c3 != 0.0) {
    const double qa = 3.0 * c3;
    const double qb = 2.0 * c2;
    const double disc = qb * qb - 4.0 * qa * c1;
    if (disc >= 0.0) {
      const double r = std::sqrt(disc);
      for (double x : {(-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa)}) {
        if (x > 0.0 && x < len) cuts.push_back(x);
      }
    }
  } else if (c2 != 0.0) {
    const double x = -c1 / (2.0 * c2);
    if (x > 0.0 && x < len) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());

  std::vector<double> candidates{0.0, len};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i];
    double hi = cuts[i + 1];
    double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0) {
      candidates.push_back(lo);
      continue;
    }
    if ((glo < 0.0) == (ghi < 0.0) || ghi == 0.0) {
      if (ghi == 0.0) candidates.push_back(hi);
      continue;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = g(mid);
      if ((gm < 0.0) == (glo < 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    candidates.push_back(0.5 * (lo + hi));
  }
  std::sort(candidates.begin(), candidates.end());

  ClosestApproach best{std::numeric_limits<double>::infinity(), 0.0};
  for (double x : candidates) {
    const double d = std::sqrt(dist2(x));
    if (d < best.distance - 1e-12) best = {d, x};
  }
  return best;
}

}  // namespace

ClosestApproach closest_approach(const world::AgentSample& a, const world::AgentSample& b,
                                 double horizon) {
  const Mover ma(a);
  const Mover mb(b);
  std::vector<double> breaks{0.0, horizon};
  for (double t : {ma.t_stop, mb.t_stop}) {
    if (t > 0.0 && t < horizon) breaks.push_back(t);
  }
  std::sort(breaks.begin(), breaks.end());

  ClosestApproach best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double t0 = breaks[i];
    const double len = breaks[i + 1] - t0;
    if (len <= 0.0) continue;
    const Vec2 A = mb.position(t0) - ma.position(t0);
    const Vec2 B = mb.velocity(t0) - ma.velocity(t0);
    const Vec2 C = 0.5 * (mb.acceleration(t0) - ma.acceleration(t0));
    const auto piece = minimize_piece(A, B, C, len);
    if (piece.distance < best.distance - 1e-12) best = {piece.distance, t0 + piece.tau};
  }
  if (!std::isfinite(best.distance)) best = {(b.position() - a.position()).norm(), 0.0};
  return best;
}

ConflictIndicators compute_indicators(std::span<const world::AgentSample> ego,
                                      std::span<const world::AgentSample> ped, double horizon,
                                      double dt, double contact_radius) {
  if (ego.empty() || ped.empty()) throw AlignmentError("trajectories are empty");
  if (ego.size() != ped.size()) {
    throw AlignmentError("trajectories differ in length (" + std::to_string(ego.size()) + " vs " +
                         std::to_string(ped.size()) + ")");
  }
  if (!(dt > 0.0)) throw AlignmentError("dt must be positive");

  ConflictIndicators out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < ego.size(); ++f) {
    const auto ca = closest_approach(ego[f], ped[f], horizon);
    const double md = ca.distance - contact_radius;
    if (md < best - 1e-12) {
      best = md;
      out.md = md;
      out.tmd = ca.tau;
      out.cs = (ego[f].velocity() - ped[f].velocity()).norm();
      out.frame = static_cast<int>(f);
    }
  }
  return out;
}

EventLabel classify_event(const ConflictIndicators& ind, bool contact, const SafetyParams& params) {
  if (contact) return EventLabel::collision;
  if (ind.md < params.conflict_gate &&
      (ind.tmd < params.tmd_threshold || ind.cs > params.cs_threshold)) {
    return EventLabel::conflict;
  }
  return EventLabel::non_conflict;
}

}  // namespace pedsafe::safety
