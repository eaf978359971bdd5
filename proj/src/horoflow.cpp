#include "horolab/horoflow.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "detail/kernels.hpp"
#include "horolab/error.hpp"
#include "horolab/sieve.hpp"

namespace horolab {

namespace {

constexpr double kDegenerateSine = 1e-12;

detail::Point<long double> widen(const IwasawaPoint& p) { return {p.x, p.y, p.theta}; }

IwasawaPoint narrow(const detail::Point<long double>& p) {
  return {static_cast<double>(p.x), static_cast<double>(p.y), static_cast<double>(p.theta)};
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

HorocycleParams horocycle_params(const IwasawaPoint& p) {
  const double s = std::sin(p.theta);
  if (std::fabs(s) <= kDegenerateSine) {
    fail(ErrorCode::DegenerateHorocycle, "horocycle through the cusp (sin theta = 0)");
  }
  const double w = std::cos(p.theta) / s;
  return {p.y / (s * s), p.x - p.y * w, w, p.y, p.theta};
}

IwasawaPoint flow_point(const IwasawaPoint& p, double t) {
  return narrow(detail::flow_from<long double>(widen(p), t));
}

IwasawaPoint flow_point(const GroupElement& g, double t) { return flow_point(iwasawa_decompose(g), t); }

void validate(const OrbitSpec& spec) {
  require(std::isfinite(spec.step) && spec.step > 0.0, ErrorCode::InvalidArgument, "orbit step must be > 0");
  require(spec.count >= 1, ErrorCode::InvalidArgument, "orbit count must be >= 1");
  if (spec.mode == FlowMode::Continuous) {
    require(std::holds_alternative<AllIndices>(spec.index_set), ErrorCode::InvalidArgument,
            "continuous mode samples the whole piece and takes no index set");
  }
  if (const auto* prog = std::get_if<ProgressionIndices>(&spec.index_set)) {
    require(prog->modulus >= 1, ErrorCode::InvalidArgument, "progression modulus must be >= 1");
  }
  if (const auto* ap = std::get_if<AlmostPrimeIndices>(&spec.index_set)) {
    require(ap->max_factors >= 1, ErrorCode::InvalidArgument, "almost-prime factor bound must be >= 1");
  }
}

std::vector<std::uint64_t> orbit_indices(const OrbitSpec& spec) {
  validate(spec);
  const std::uint64_t N = spec.count;
  std::vector<std::uint64_t> out = std::visit(
      Overloaded{
          [&](const AllIndices&) {
            std::vector<std::uint64_t> v(N);
            for (std::uint64_t n = 0; n < N; ++n) v[n] = n;
            return v;
          },
          [&](const PrimeIndices&) {
            std::vector<std::uint64_t> v;
            if (N > 2) {
              const PrimeTable table = primes_up_to(N - 1);
              v.assign(table.primes().begin(), table.primes().end());
            }
            return v;
          },
          [&](const ProgressionIndices& p) {
            std::vector<std::uint64_t> v;
            for (std::uint64_t m = p.modulus; m <= N; m += p.modulus) v.push_back(m);
            return v;
          },
          [&](const AlmostPrimeIndices& a) { return almost_primes(N, a.max_factors, a.include_one); },
      },
      spec.index_set);
  if (out.empty()) fail(ErrorCode::EmptyIndexSet, "index set is empty for N = " + std::to_string(N));
  return out;
}

IwasawaPoint reduced_flow_point(const IwasawaPoint& base, double t, const ReduceConfig& config) {
  auto p = detail::flow_from<long double>(widen(base), static_cast<long double>(t));
  detail::NoWitness w;
  detail::reduce_inplace(p, config.iteration_cap, w);
  return narrow(p);
}

OrbitBatch orbit_points(const OrbitSpec& spec, const ReduceConfig& config) {
  OrbitBatch batch;
  batch.indices = orbit_indices(spec);
  const std::size_t n = batch.indices.size();
  batch.points.resize(n);

  const detail::Point<long double> base = widen(iwasawa_decompose(spec.base));
  const long double step = spec.step;
  const long double offset = spec.mode == FlowMode::Continuous ? 0.5L : 0.0L;

  std::size_t low = 0;
  std::int64_t failed_at = -1;
  std::string failure;
#pragma omp parallel for schedule(static) reduction(+ : low)
  for (std::size_t i = 0; i < n; ++i) {
    const long double t = step * (static_cast<long double>(batch.indices[i]) + offset);
    auto p = detail::flow_from<long double>(base, t);
    if (p.y < kPrecisionFloorHeight) ++low;
    detail::NoWitness w;
    try {
      detail::reduce_inplace(p, config.iteration_cap, w);
    } catch (const Error& e) {
#pragma omp critical(horolab_orbit_failure)
      if (failed_at < 0 || static_cast<std::int64_t>(batch.indices[i]) < failed_at) {
        failed_at = static_cast<std::int64_t>(batch.indices[i]);
        failure = e.what();
      }
      continue;
    }
    batch.points[i] = narrow(p);
  }
  if (failed_at >= 0) {
    fail(ErrorCode::IterationCap, "orbit index " + std::to_string(failed_at) + ": " + failure);
  }
  batch.low_precision = low;
  return batch;
}

double min_height_Y_T(const IwasawaPoint& p, double T) {
  require(T >= 0.0, ErrorCode::InvalidArgument, "piece length must be >= 0");
  return std::min(p.y, flow_point(p, T).y);
}

double min_height_Y_T(const GroupElement& g, double T) { return min_height_Y_T(iwasawa_decompose(g), T); }

FlatPiece::FlatPiece(const IwasawaPoint& peak, double T, int sign)
    : params_(horocycle_params(peak)), length_(T), sign_(sign) {
  require(sign == 1 || sign == -1, ErrorCode::InvalidArgument, "sign must be +1 or -1");
  require(T >= 0.0, ErrorCode::InvalidArgument, "piece length must be >= 0");
  if (std::fabs(params_.slope) < T / 2.0) {
    fail(ErrorCode::PreconditionViolated, "flat parametrization needs |W| >= T/2");
  }
}

double FlatPiece::x(double t) const {
  return params_.tangency + params_.y * params_.slope / scale(t);
}

double FlatPiece::y(double t) const {
  const double k = scale(t);
  return params_.y / (k * k);
}

double FlatPiece::error_bound(double t) const {
  return 1.0 / (std::fabs(params_.slope) * std::fabs(scale(t)));
}

FlatPiece piece_flat_parametrization(const IwasawaPoint& peak, double T, int sign) {
  return FlatPiece(peak, T, sign);
}

}  // namespace horolab
