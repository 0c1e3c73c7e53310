#include "sigsde/driving_moments.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sigsde/parallel.hpp"
#include "sigsde/rng.hpp"
#include "sigsde/signature.hpp"

namespace sigsde {

TruncTensor expected_signature_bm_time(int n, double T, int q_max) {
  if (n < 0 || q_max < 0) throw std::invalid_argument("expected_signature_bm_time: bad arguments");
  if (!(T > 0.0)) throw std::invalid_argument("expected_signature_bm_time: T must be positive");
  TruncTensor gen(n + 1, q_max);
  if (q_max >= 1) gen.set(Word{0}, T);
  if (q_max >= 2) {
    for (int i = 1; i <= n; ++i) gen.set(Word{i, i}, 0.5 * T);
  }
  return trunc_exp(gen);
}

std::size_t grid_steps(double T, double dt) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("T and dt must be positive");
  const double ratio = T / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-6 * std::max(1.0, ratio)) {
    throw std::invalid_argument("dt does not divide T");
  }
  return static_cast<std::size_t>(steps);
}

namespace {

constexpr std::size_t kChunk = 256;

struct Partial {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

}  // namespace

MonteCarloSignature mc_expected_signature(int n, double T, int q_max, std::size_t N, double dt,
                                          std::uint64_t seed, const MonteCarloOptions& options) {
  if (N < 1) throw std::invalid_argument("mc_expected_signature: N must be >= 1");
  const std::size_t steps = grid_steps(T, dt);
  if (options.richardson && steps % 2 != 0) {
    throw std::invalid_argument("mc_expected_signature: extrapolation needs an even number of steps");
  }
  const double h = T / static_cast<double>(steps);
  const double sqrt_h = std::sqrt(h);
  const int a = n + 1;
  const std::size_t size = tensor_size(a, q_max);

  std::vector<char> keep(size, 1);
  if (options.reflect) {
    const auto words = enumerate_words(a, q_max);
    for (std::size_t w = 0; w < size; ++w) {
      for (int i = 1; i <= n; ++i) {
        if (words[w].count(i) % 2 == 1) keep[w] = 0;
      }
    }
  }

  // Fixed chunking makes the reduction order independent of thread count.
  const std::size_t chunks = (N + kChunk - 1) / kChunk;
  std::vector<Partial> partials(chunks);
  parallel_for(chunks, options.threads, [&](std::size_t c) {
    Partial& p = partials[c];
    p.sum.assign(size, 0.0);
    p.sum_sq.assign(size, 0.0);
    std::vector<double> inc(static_cast<std::size_t>(a)), pair(static_cast<std::size_t>(a));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t end = std::min(N, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) {
      Engine rng = make_engine(seed, k);
      TruncTensor sig = TruncTensor::unit(a, q_max);
      TruncTensor coarse = TruncTensor::unit(a, q_max);
      inc[0] = h;
      pair[0] = 2.0 * h;
      for (std::size_t s = 0; s < steps; ++s) {
        for (int i = 1; i <= n; ++i) inc[static_cast<std::size_t>(i)] = sqrt_h * normal(rng);
        extend_by_segment(sig, inc);
        if (!options.richardson) continue;
        if (s % 2 == 0) {
          for (int i = 1; i <= n; ++i) pair[static_cast<std::size_t>(i)] = inc[static_cast<std::size_t>(i)];
        } else {
          for (int i = 1; i <= n; ++i) pair[static_cast<std::size_t>(i)] += inc[static_cast<std::size_t>(i)];
          extend_by_segment(coarse, pair);
        }
      }
      for (std::size_t w = 0; w < size; ++w) {
        const double x = options.richardson ? 2.0 * sig.at(w) - coarse.at(w) : sig.at(w);
        const double v = keep[w] ? x : 0.0;
        p.sum[w] += v;
        p.sum_sq[w] += v * v;
      }
    }
  });

  MonteCarloSignature out{TruncTensor(a, q_max), TruncTensor(a, q_max), N};
  std::vector<double> sum(size, 0.0), sum_sq(size, 0.0);
  for (const auto& p : partials) {
    for (std::size_t w = 0; w < size; ++w) {
      sum[w] += p.sum[w];
      sum_sq[w] += p.sum_sq[w];
    }
  }
  const double dn = static_cast<double>(N);
  for (std::size_t w = 0; w < size; ++w) {
    const double mean = sum[w] / dn;
    out.mean.at(w) = mean;
    if (N > 1) {
      const double var = std::max(0.0, (sum_sq[w] - dn * mean * mean) / (dn - 1.0));
      out.std_error.at(w) = std::sqrt(var / dn);
    }
  }
  return out;
}

McComparison compare_mc(const TruncTensor& exact, const MonteCarloSignature& mc) {
  if (exact.size() != mc.mean.size()) throw std::invalid_argument("compare_mc: shape mismatch");
  McComparison out;
  const auto words = enumerate_words(exact.alphabet_size(), exact.level());
  for (std::size_t w = 0; w < words.size(); ++w) {
    if (words[w].count(0) == words[w].size()) continue;  // pure time: no noise
    const double se = mc.std_error.at(w);
    if (se == 0.0) continue;
    const double z = (mc.mean.at(w) - exact.at(w)) / se;
    ++out.compared;
    if (std::abs(z) > 2.0) ++out.outside2;
    if (std::abs(z) > 3.0) ++out.outside3;
    out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
  }
  return out;
}

}  // namespace sigsde
