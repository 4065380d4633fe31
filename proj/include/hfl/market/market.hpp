#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/format.hpp"
#include "hfl/core/random.hpp"
#include "hfl/market/floor_plan.hpp"

namespace hfl {

// Structural and locational variables with a per-standardized-unit effect on
// log rent.
inline constexpr std::array<const char*, 6> kStructuralVariables = {
    "area", "rooms", "floor", "top_floor", "city_distance", "year_built"};

// Reference location/scale used to standardize structural variables inside
// the price model (the published sample means and standard deviations).
struct VariableScale {
  double mean;
  double sd;
};
inline constexpr std::array<VariableScale, 6> kReferenceScales = {{
    {71.35, 26.35}, {2.44, 0.89}, {2.89, 2.29}, {5.09, 2.21}, {7.99, 4.26}, {1970.0, 43.76}}};

// Published value ranges; listings outside them are redrawn.
struct Bounds {
  double area_min = 16.0, area_max = 178.08;
  int rooms_min = 1, rooms_max = 6;
  int floor_max = 26, top_floor_max = 27;
  double distance_min = 0.37, distance_max = 17.54;
  int year_min = 1830, year_max = 2020;
  double rent_min = 230.19, rent_max = 2988.0;
  double rpms_min = 5.38, rpms_max = 27.80;
};

struct MarketConfig {
  std::size_t n_listings = 2000;
  std::uint64_t seed = 1;

  double intercept = 6.55;
  // area, rooms, floor, top_floor, city_distance, year_built
  std::array<double, 6> beta_structural = {0.40, -0.03, 0.015, -0.02, -0.10, 0.06};
  double district_effect_scale = 0.10;
  double control_effect_scale = 0.03;
  double gamma_layout = 0.40;
  double noise_sigma = 0.23;

  // Optional effect heterogeneity: gamma_i = gamma * (1 + small_boost*[area <
  // small_area_below] + old_boost*[year_built < old_year_below]).
  double gamma_small_boost = 0.0;
  double gamma_old_boost = 0.0;
  double small_area_below = 67.41;
  double old_year_below = 1985.0;

  int n_districts = 12;
  int n_controls = 30;
  double control_probability = 0.3;
  int raster_size = 64;
  GeometryParams geometry;
  QualityWeights quality_weights;
  Bounds bounds;
};

inline void validate(const MarketConfig& c) {
  require(c.noise_sigma >= 0.0, ErrorKind::ConfigError, "noise_sigma must be >= 0");
  require(c.n_districts >= 1, ErrorKind::ConfigError, "n_districts must be >= 1");
  require(c.n_controls >= 0, ErrorKind::ConfigError, "n_controls must be >= 0");
  require(c.raster_size >= 16, ErrorKind::ConfigError, "raster_size must be >= 16");
  require(c.control_probability >= 0.0 && c.control_probability <= 1.0, ErrorKind::ConfigError,
          "control_probability must be in [0, 1]");
}

inline std::string control_column(int k) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "ctrl_%02d", k);
  return buf;
}

struct ListingRecord {
  std::int64_t id = 0;
  double area = 0.0;
  int rooms = 0;
  int floor = 0;
  int top_floor = 0;
  double city_distance = 0.0;
  int year_built = 0;
  int district = 0;
  std::vector<std::uint8_t> controls;
  double rent = 0.0;
  double rpms = 0.0;

  bool operator==(const ListingRecord&) const = default;
};

// Generator-side ground truth for a listing.
struct ListingTruth {
  std::int64_t id = 0;
  double q = 0.0;
  // log(rent) minus its structural/locational part: gamma_i * q + noise.
  double residual_truth = 0.0;
  bool operator==(const ListingTruth&) const = default;
};

struct Market {
  std::vector<ListingRecord> listings;
  std::vector<FloorPlanGeometry> geometries;
  std::vector<LayoutQuality> qualities;
  std::vector<ListingTruth> truth;
};

inline double district_effect(const MarketConfig& c, int district) {
  if (district == 0) return 0.0;
  return c.district_effect_scale * std::sin(0.9 * district + 0.3);
}

inline double control_effect(const MarketConfig& c, int index) {
  return c.control_effect_scale * (((index * 7) % 5) - 2) / 2.0;
}

inline double structural_value(const ListingRecord& r, std::size_t j) {
  switch (j) {
    case 0: return r.area;
    case 1: return r.rooms;
    case 2: return r.floor;
    case 3: return r.top_floor;
    case 4: return r.city_distance;
    default: return r.year_built;
  }
}

// Structural + locational + control part of log rent (everything except the
// layout term and the noise).
inline double structural_log_rent(const MarketConfig& c, const ListingRecord& r) {
  double v = c.intercept;
  for (std::size_t j = 0; j < 6; ++j)
    v += c.beta_structural[j] * (structural_value(r, j) - kReferenceScales[j].mean) / kReferenceScales[j].sd;
  v += district_effect(c, r.district);
  for (std::size_t k = 0; k < r.controls.size(); ++k)
    if (r.controls[k]) v += control_effect(c, static_cast<int>(k));
  return v;
}

inline double layout_gamma(const MarketConfig& c, const ListingRecord& r) {
  double m = 1.0;
  if (r.area < c.small_area_below) m += c.gamma_small_boost;
  if (r.year_built < c.old_year_below) m += c.gamma_old_boost;
  return c.gamma_layout * m;
}

namespace detail {

// Divides by the inverse so the result is the double nearest the decimal value.
inline double round_to(double v, double step) { return std::round(v / step) / std::round(1.0 / step); }

struct GeneratedListing {
  ListingRecord record;
  FloorPlanGeometry geometry;
  LayoutQuality quality;
  ListingTruth truth;
};

inline GeneratedListing generate_listing(const MarketConfig& c, std::int64_t id) {
  const Bounds& b = c.bounds;
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(c.seed, static_cast<std::uint64_t>(id), attempt));
    ListingRecord r;
    r.id = id;

    // Log-normal area matched to the published mean and median.
    double area;
    do {
      area = std::exp(rng.normal(std::log(67.41), 0.337));
    } while (area < b.area_min || area > b.area_max);
    r.area = std::clamp(round_to(area, 0.01), b.area_min, b.area_max);

    const double z_area = (r.area - 71.35) / 26.35;
    const double rooms_cont = 2.44 + 0.89 * (0.84 * z_area + std::sqrt(1 - 0.84 * 0.84) * rng.normal());
    const int room_cap = std::max(1, static_cast<int>(r.area / (c.geometry.min_room_area * 1.5)));
    r.rooms = std::clamp(static_cast<int>(std::lround(rooms_cont)), b.rooms_min, std::min(b.rooms_max, room_cap));

    r.district = rng.uniform_int(0, c.n_districts - 1);
    const double base = c.n_districts > 1 ? 1.0 + 14.0 * r.district / (c.n_districts - 1) : 8.0;
    double dist;
    do {
      dist = rng.normal(base, 1.8);
    } while (dist < b.distance_min || dist > b.distance_max);
    r.city_distance = std::clamp(round_to(dist, 0.01), b.distance_min, b.distance_max);

    double year;
    if (rng.bernoulli(0.25)) {
      year = rng.uniform(1830.0, 1935.0);
    } else {
      year = rng.normal(1994.0 + 0.8 * (r.city_distance - 8.0), 15.0);
    }
    r.year_built = std::clamp(static_cast<int>(std::lround(year)), b.year_min, b.year_max);

    const double z_year = (r.year_built - 1970.0) / 43.76;
    const double z_dist = (r.city_distance - 7.99) / 4.26;
    const double top = 5.09 + 2.21 * (0.16 * z_year - 0.14 * z_dist + 0.97 * rng.normal());
    r.top_floor = std::clamp(static_cast<int>(std::lround(top)), 0, b.top_floor_max);
    r.floor = std::min(std::clamp(static_cast<int>(std::lround(std::pow(rng.uniform(), 0.8) * r.top_floor)),
                                  0, b.floor_max),
                       r.top_floor);

    r.controls.resize(static_cast<std::size_t>(c.n_controls));
    for (auto& flag : r.controls) flag = rng.bernoulli(c.control_probability) ? 1 : 0;

    FloorPlanGeometry geometry = synth_geometry(rng, r.area, r.rooms, c.geometry);
    const LayoutQuality quality = layout_quality(geometry, c.quality_weights);

    const double noise = c.noise_sigma > 0.0 ? c.noise_sigma * rng.normal() : 0.0;
    const double residual = layout_gamma(c, r) * quality.q + noise;
    const double log_rent = structural_log_rent(c, r) + residual;
    r.rent = quantize_g9(std::exp(log_rent));
    r.rpms = r.rent / r.area;

    const bool in_bounds = r.rent >= b.rent_min && r.rent <= b.rent_max && r.rpms >= b.rpms_min &&
                           r.rpms <= b.rpms_max;
    if (!in_bounds && attempt < 256) continue;
    return {std::move(r), std::move(geometry), quality, {id, quality.q, residual}};
  }
}

}  // namespace detail

// Synthetic market: log(rent) = structural part + gamma*q + noise. Each listing
// draws from its own stream derived from (seed, id), so the output does not
// depend on the number of worker threads.
inline Market generate_market(const MarketConfig& config, unsigned threads = 1) {
  validate(config);
  const std::size_t n = config.n_listings;
  std::vector<detail::GeneratedListing> out(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      out[i] = detail::generate_listing(config, static_cast<std::int64_t>(i + 1));
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(n, t * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  Market m;
  m.listings.reserve(n);
  m.geometries.reserve(n);
  m.qualities.reserve(n);
  m.truth.reserve(n);
  for (auto& g : out) {
    m.listings.push_back(std::move(g.record));
    m.geometries.push_back(std::move(g.geometry));
    m.qualities.push_back(g.quality);
    m.truth.push_back(g.truth);
  }
  return m;
}

}  // namespace hfl
