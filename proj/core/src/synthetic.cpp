// Copyright 2026 The bitesense Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "bitesense/synthetic.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "bitesense/error.hpp"
#include "bitesense/rng.hpp"

namespace bitesense::synthetic {
namespace {

constexpr double kGravity = 9.81;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Vec3 = std::array<double, 3>;

Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

// Motion added on top of the gravity projection; t is seconds since the
// phase started.
using Motion = std::function<Vec3(double t)>;

Motion still() {
  return [](double) { return Vec3{0.0, 0.0, 0.0}; };
}

Motion wobble(double freq, Vec3 amp, double phase = 0.0) {
  return [=](double t) {
    const double s = std::sin(kTwoPi * freq * t + phase);
    return Vec3{amp[0] * s, amp[1] * s, amp[2] * std::cos(kTwoPi * freq * t + phase)};
  };
}

struct Phase {
  double seconds;
  Vec3 from;
  Vec3 to;  // equal to `from` for a hold
  Motion motion;
};

class Builder {
 public:
  explicit Builder(Rng& rng) : rng_(rng) {}

  Vec3 jitter(Vec3 v, double amount) {
    for (double& c : v) c += rng_.uniform(-amount, amount);
    return normalized(v);
  }
  double vary(double lo, double hi) { return rng_.uniform(lo, hi); }

  void hold(double seconds, Vec3 orient, Motion m = still()) {
    phases_.push_back({seconds, orient, orient, std::move(m)});
    current_ = orient;
  }
  void move(double seconds, Vec3 to, Motion m = still()) {
    phases_.push_back({seconds, current_, to, std::move(m)});
    current_ = to;
  }
  void set_current(Vec3 v) { current_ = v; }
  Vec3 current() const { return current_; }

  double seconds() const {
    double s = 0.0;
    for (const auto& p : phases_) s += p.seconds;
    return s;
  }

  // Renders all phases at `rate_hz`, appending to `out` with timestamps
  // starting at t0_ms.
  void render(double rate_hz, double noise, std::int64_t t0_ms, std::vector<Sample>& out) {
    const double dt = 1.0 / rate_hz;
    const auto period_ms = static_cast<std::int64_t>(std::llround(1000.0 / rate_hz));
    const std::int64_t base_index = static_cast<std::int64_t>(out.size());
    double phase_start = 0.0;
    std::int64_t j = 0;
    double t = 0.0;
    for (const Phase& p : phases_) {
      const double end = phase_start + p.seconds;
      for (; t < end; t = static_cast<double>(++j) * dt) {
        const double local = t - phase_start;
        const double u = p.seconds > 0 ? local / p.seconds : 1.0;
        const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * u);
        Vec3 o = normalized({p.from[0] + (p.to[0] - p.from[0]) * w,
                             p.from[1] + (p.to[1] - p.from[1]) * w,
                             p.from[2] + (p.to[2] - p.from[2]) * w});
        const Vec3 m = p.motion(local);
        Sample s;
        s.t_ms = t0_ms + (base_index + j) * period_ms;
        s.x = kGravity * o[0] + m[0] + rng_.normal(0.0, noise);
        s.y = kGravity * o[1] + m[1] + rng_.normal(0.0, noise);
        s.z = kGravity * o[2] + m[2] + rng_.normal(0.0, noise);
        out.push_back(s);
      }
      phase_start = end;
    }
    phases_.clear();
  }

 private:
  Rng& rng_;
  std::vector<Phase> phases_;
  Vec3 current_{0.0, 0.0, 1.0};
};

void idle(Builder& b, double seconds) {
  const Vec3 rest = b.jitter({0.1, -0.3, 0.95}, 0.25);
  b.move(1.0, rest);
  double left = seconds - 1.0;
  while (left > 0.0) {
    const double chunk = std::min(left, b.vary(1.5, 3.0));
    b.hold(chunk, b.jitter(rest, 0.08), wobble(b.vary(0.2, 0.6), {0.3, 0.3, 0.2}));
    left -= chunk;
  }
}

void eating(Builder& b, double seconds) {
  const Vec3 plate = b.jitter({0.05, -0.25, 0.97}, 0.08);
  const Vec3 mouth = b.jitter({-0.75, 0.55, 0.35}, 0.08);
  b.move(1.0, plate);
  while (b.seconds() < seconds) {
    b.hold(b.vary(1.5, 3.0), b.jitter(plate, 0.05),
           wobble(b.vary(3.5, 4.5), {b.vary(0.6, 1.0), b.vary(0.3, 0.5), 0.2}));
    b.move(b.vary(0.9, 1.3), b.jitter(mouth, 0.05));
    b.hold(b.vary(0.4, 0.8), b.current(), wobble(b.vary(1.0, 1.5), {0.2, 0.2, 0.1}));
    b.move(b.vary(0.9, 1.3), b.jitter(plate, 0.05));
  }
}

void smoking(Builder& b, double seconds) {
  const Vec3 side = b.jitter({0.15, -0.95, 0.25}, 0.08);
  const Vec3 mouth = b.jitter({-0.35, 0.75, -0.55}, 0.08);
  b.move(1.0, side);
  while (b.seconds() < seconds) {
    b.hold(b.vary(6.0, 9.0), b.jitter(side, 0.05), wobble(b.vary(0.3, 0.7), {0.1, 0.1, 0.1}));
    b.move(b.vary(1.5, 2.0), b.jitter(mouth, 0.05));
    b.hold(b.vary(1.5, 2.5), b.current(), wobble(0.5, {0.05, 0.05, 0.05}));
    b.move(b.vary(1.5, 2.0), b.jitter(side, 0.05));
  }
}

void medication(Builder& b, double seconds) {
  while (b.seconds() < seconds) {
    const double twist = b.vary(2.0, 3.0);
    b.move(b.vary(0.8, 1.2), b.jitter({0.6, -0.5, 0.6}, 0.08));
    b.hold(twist, b.current(), wobble(b.vary(2.0, 3.0), {b.vary(2.0, 3.0), 1.0, 1.5}));
    b.move(b.vary(1.0, 1.5), b.jitter({0.9, 0.1, -0.4}, 0.08));
    b.hold(b.vary(1.0, 2.0), b.current(), wobble(1.5, {0.3, 0.3, 0.3}));
    b.move(b.vary(0.8, 1.2), b.jitter({-0.6, 0.6, 0.5}, 0.08));
    b.hold(b.vary(0.8, 1.2), b.current());
    b.move(b.vary(0.8, 1.2), b.jitter({-0.3, 0.9, -0.3}, 0.08));
    b.hold(b.vary(3.0, 4.0), b.current(), wobble(0.8, {0.2, 0.2, 0.2}));
    b.move(b.vary(1.0, 1.5), b.jitter({0.0, -0.1, 1.0}, 0.1));
    b.hold(b.vary(3.0, 5.0), b.current(), wobble(0.3, {0.2, 0.2, 0.1}));
  }
}

void jogging(Builder& b, double seconds) {
  const Vec3 base = b.jitter({0.3, -0.85, 0.4}, 0.1);
  b.move(1.0, base);
  const double freq = b.vary(2.5, 3.0);
  const double amp = b.vary(8.0, 11.0);
  const double side = b.vary(2.0, 4.0);
  while (b.seconds() < seconds) {
    const double chunk = b.vary(2.0, 4.0);
    const double phase = b.vary(0.0, kTwoPi);
    b.hold(chunk, b.jitter(base, 0.04), [=](double t) {
      const double w = kTwoPi * freq * t + phase;
      return Vec3{side * std::sin(2.0 * w), amp * std::sin(w), 0.5 * amp * std::sin(w + 1.0)};
    });
  }
}

}  // namespace

Session generate_session(const std::string& activity, std::uint64_t seed,
                         const Options& options) {
  Rng rng(seed);
  Builder b(rng);
  Session session;
  session.recording_id = activity + "-" + std::to_string(seed);
  session.recording.device_id = session.recording_id;
  session.recording.nominal_rate_hz = options.rate_hz;

  const double lead = options.lead_seconds * rng.uniform(0.8, 1.2);
  const double body = options.activity_seconds * rng.uniform(0.85, 1.15);
  const std::int64_t t0 =
      1'600'000'000'000 + static_cast<std::int64_t>(rng.uniform_index(1'000'000'000));
  auto& samples = session.recording.samples;

  idle(b, lead);
  b.render(options.rate_hz, options.noise_stddev, t0, samples);
  const std::int64_t true_start = samples.back().t_ms + 1;

  if (activity == "eating") {
    eating(b, body);
  } else if (activity == "smoking") {
    smoking(b, body);
  } else if (activity == "medication") {
    medication(b, body);
  } else if (activity == "jogging") {
    jogging(b, body);
  } else {
    throw Error(Errc::kUnknownLabel, "no synthetic model for '" + activity + "'");
  }
  b.render(options.rate_hz, options.noise_stddev, t0, samples);
  const std::int64_t true_stop = samples.back().t_ms;

  idle(b, lead);
  b.render(options.rate_hz, options.noise_stddev, t0, samples);

  const double slop_ms = options.max_report_slop_seconds * 1000.0;
  AnnotationSpan span;
  span.label = activity;
  span.trim_head_ms = static_cast<std::int64_t>(rng.uniform(0.0, slop_ms));
  span.trim_tail_ms = static_cast<std::int64_t>(rng.uniform(0.0, slop_ms));
  span.reported_start_ms = true_start - span.trim_head_ms;
  span.reported_stop_ms = true_stop + span.trim_tail_ms;
  span.confirmed = true;
  session.spans.push_back(span);
  return session;
}

std::vector<Session> generate_corpus(const Options& options) {
  std::vector<Session> out;
  for (std::size_t a = 0; a < options.activities.size(); ++a) {
    for (std::size_t s = 0; s < options.sessions_per_activity; ++s) {
      const std::uint64_t seed = mix_seed(options.seed, a * 1000 + s);
      out.push_back(generate_session(options.activities[a], seed, options));
    }
  }
  return out;
}

}  // namespace bitesense::synthetic
