#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hfl/core/csv.hpp"
#include "hfl/core/error.hpp"
#include "hfl/core/format.hpp"
#include "hfl/image/pgm.hpp"
#include "hfl/market/market.hpp"

namespace hfl {

// On-disk dataset: listings.csv, plans/<id>.pgm, optional truth.csv.
struct Dataset {
  std::vector<ListingRecord> listings;
  std::vector<GrayImage> images;  // aligned with listings
  std::optional<std::vector<ListingTruth>> truth;
};

inline std::vector<std::string> listings_header(int n_controls) {
  std::vector<std::string> h = {"id",   "area",          "rooms",      "floor",
                                "top_floor", "city_distance", "year_built", "district"};
  for (int k = 0; k < n_controls; ++k) h.push_back(control_column(k));
  h.push_back("rent");
  h.push_back("rpms");
  return h;
}

inline std::string plan_path(const std::filesystem::path& dir, std::int64_t id) {
  return (dir / "plans" / (std::to_string(id) + ".pgm")).string();
}

inline void write_dataset(const std::filesystem::path& dir, const std::vector<ListingRecord>& listings,
                          const std::vector<GrayImage>& images,
                          const std::vector<ListingTruth>* truth = nullptr) {
  require(images.size() == listings.size(), ErrorKind::InvalidArgument,
          "one image per listing required");
  std::error_code ec;
  std::filesystem::create_directories(dir / "plans", ec);
  if (ec) fail(ErrorKind::IoError, "cannot create " + (dir / "plans").string() + ": " + ec.message());

  const int n_controls = listings.empty() ? 30 : static_cast<int>(listings.front().controls.size());
  std::ofstream out(dir / "listings.csv");
  if (!out) fail(ErrorKind::IoError, "cannot write " + (dir / "listings.csv").string());
  out << csv::join(listings_header(n_controls)) << '\n';
  for (std::size_t i = 0; i < listings.size(); ++i) {
    const auto& r = listings[i];
    require(static_cast<int>(r.controls.size()) == n_controls, ErrorKind::InvalidArgument,
            "inconsistent control count");
    out << r.id << ',' << format_g9(r.area) << ',' << r.rooms << ',' << r.floor << ',' << r.top_floor
        << ',' << format_g9(r.city_distance) << ',' << r.year_built << ',' << r.district;
    for (auto flag : r.controls) out << ',' << static_cast<int>(flag);
    out << ',' << format_g9(r.rent) << ',' << format_g9(r.rpms) << '\n';
    write_pgm(plan_path(dir, r.id), images[i]);
  }
  if (!out) fail(ErrorKind::IoError, "short write to listings.csv");

  if (truth) {
    std::ofstream t(dir / "truth.csv");
    if (!t) fail(ErrorKind::IoError, "cannot write truth.csv");
    t << "id,q,residual_truth\n";
    for (const auto& row : *truth)
      t << row.id << ',' << format_g9(row.q) << ',' << format_g9(row.residual_truth) << '\n';
  }
}

inline std::vector<ListingRecord> read_listings(const std::filesystem::path& dir) {
  const std::string path = (dir / "listings.csv").string();
  if (!std::filesystem::exists(path)) fail(ErrorKind::IoError, "missing " + path);
  const csv::Table table = csv::read(path);

  int n_controls = 0;
  while (std::find(table.header.begin(), table.header.end(), control_column(n_controls)) != table.header.end())
    ++n_controls;
  const auto expected = listings_header(n_controls);
  for (const auto& col : table.header)
    if (std::find(expected.begin(), expected.end(), col) == expected.end())
      fail(ErrorKind::SchemaMismatch, "unknown column '" + col + "' in " + path);
  if (table.header != expected) fail(ErrorKind::SchemaMismatch, "unexpected column layout in " + path);

  std::vector<ListingRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    const std::string ctx = path + " id " + row[0];
    ListingRecord r;
    r.id = parse_int(row[0], ctx);
    r.area = parse_double(row[1], ctx);
    r.rooms = static_cast<int>(parse_int(row[2], ctx));
    r.floor = static_cast<int>(parse_int(row[3], ctx));
    r.top_floor = static_cast<int>(parse_int(row[4], ctx));
    r.city_distance = parse_double(row[5], ctx);
    r.year_built = static_cast<int>(parse_int(row[6], ctx));
    r.district = static_cast<int>(parse_int(row[7], ctx));
    for (int k = 0; k < n_controls; ++k) {
      const auto v = parse_int(row[8 + k], ctx);
      if (v != 0 && v != 1) fail(ErrorKind::SchemaMismatch, "control flag not 0/1 in " + ctx);
      r.controls.push_back(static_cast<std::uint8_t>(v));
    }
    r.rent = parse_double(row[8 + n_controls], ctx);
    const double stored_rpms = parse_double(row[9 + n_controls], ctx);
    if (!(r.area > 0.0)) fail(ErrorKind::SchemaMismatch, "non-positive area in " + ctx);
    // rpms is derived; the stored column is checked, not trusted.
    r.rpms = r.rent / r.area;
    if (std::abs(stored_rpms - r.rpms) > 1e-8 * std::max(1.0, std::abs(r.rpms)))
      fail(ErrorKind::SchemaMismatch, "rpms inconsistent with rent/area in " + ctx);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::optional<std::vector<ListingTruth>> read_truth(const std::filesystem::path& dir) {
  const auto path = dir / "truth.csv";
  if (!std::filesystem::exists(path)) return std::nullopt;
  const csv::Table table = csv::read(path.string());
  if (table.header != std::vector<std::string>{"id", "q", "residual_truth"})
    fail(ErrorKind::SchemaMismatch, "unexpected header in " + path.string());
  std::vector<ListingTruth> out;
  for (const auto& row : table.rows)
    out.push_back({parse_int(row[0], path.string()), parse_double(row[1], path.string()),
                   parse_double(row[2], path.string())});
  return out;
}

inline Dataset read_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) fail(ErrorKind::IoError, "missing dataset directory " + dir.string());
  Dataset ds;
  ds.listings = read_listings(dir);
  if (!std::filesystem::is_directory(dir / "plans"))
    fail(ErrorKind::IoError, "missing plans directory " + (dir / "plans").string());
  ds.images.reserve(ds.listings.size());
  for (const auto& r : ds.listings) {
    const auto path = plan_path(dir, r.id);
    if (!std::filesystem::exists(path))
      fail(ErrorKind::SchemaMismatch, "no plan image for listing id " + std::to_string(r.id));
    ds.images.push_back(read_pgm(path));
  }
  ds.truth = read_truth(dir);
  return ds;
}

}  // namespace hfl
