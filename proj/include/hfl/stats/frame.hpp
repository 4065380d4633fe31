#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/market/market.hpp"

namespace hfl::stats {

enum class ColumnKind { Continuous, Dummy };

struct Standardization {
  double mean = 0.0;
  double sd = 1.0;
};

// Named n x p design block (no intercept column).
struct FeatureFrame {
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;
  Eigen::MatrixXd values;
  std::vector<std::int64_t> ids;  // row identities, may be empty
  // Present once the frame has been z-standardized.
  std::optional<std::vector<Standardization>> standardization;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

  std::optional<std::size_t> find(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names.begin());
  }

  std::size_t index_of(const std::string& name) const {
    const auto idx = find(name);
    if (!idx) fail(ErrorKind::UnknownVariable, "no column named '" + name + "'");
    return *idx;
  }
};

enum class TargetLabel { Rent, Rpms };
enum class TargetTransform { Raw, Log };

inline const char* to_string(TargetLabel label) { return label == TargetLabel::Rent ? "rent" : "rpms"; }

inline TargetLabel parse_target(const std::string& s) {
  if (s == "rent") return TargetLabel::Rent;
  if (s == "rpms") return TargetLabel::Rpms;
  fail(ErrorKind::ConfigError, "target must be 'rent' or 'rpms', got '" + s + "'");
}

struct TargetVector {
  Eigen::VectorXd values;
  TargetTransform transform = TargetTransform::Log;
  TargetLabel label = TargetLabel::Rpms;
};

// Which listing fields enter a hedonic design.
struct VariableSpec {
  std::vector<std::string> explanatory = {"area",      "rooms",         "floor",
                                          "top_floor", "city_distance", "year_built"};
  bool districts = true;
  int n_districts = 12;
  bool controls = true;
  bool standardize = true;
};

inline std::string district_column(int d) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "district_%02d", d);
  return buf;
}

inline double listing_field(const ListingRecord& r, const std::string& name) {
  for (std::size_t j = 0; j < kStructuralVariables.size(); ++j)
    if (name == kStructuralVariables[j]) return structural_value(r, j);
  fail(ErrorKind::UnknownVariable, "unknown variable '" + name + "'");
}

// Unstandardized design: explanatory columns, district dummies (district 0 is
// the reference level), control flags.
inline FeatureFrame raw_frame(const std::vector<ListingRecord>& listings, const VariableSpec& spec) {
  for (const auto& name : spec.explanatory) {
    const bool known = std::find(kStructuralVariables.begin(), kStructuralVariables.end(), name) !=
                       kStructuralVariables.end();
    if (!known) fail(ErrorKind::UnknownVariable, "unknown variable '" + name + "'");
  }
  FeatureFrame f;
  for (const auto& name : spec.explanatory) {
    f.names.push_back(name);
    f.kinds.push_back(ColumnKind::Continuous);
  }
  if (spec.districts)
    for (int d = 1; d < spec.n_districts; ++d) {
      f.names.push_back(district_column(d));
      f.kinds.push_back(ColumnKind::Dummy);
    }
  const int n_controls = spec.controls && !listings.empty() ? static_cast<int>(listings.front().controls.size()) : 0;
  for (int k = 0; k < n_controls; ++k) {
    f.names.push_back(control_column(k));
    f.kinds.push_back(ColumnKind::Dummy);
  }

  const Eigen::Index n = static_cast<Eigen::Index>(listings.size());
  f.values.resize(n, static_cast<Eigen::Index>(f.names.size()));
  f.ids.reserve(listings.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = listings[static_cast<std::size_t>(i)];
    f.ids.push_back(r.id);
    Eigen::Index c = 0;
    for (const auto& name : spec.explanatory) f.values(i, c++) = listing_field(r, name);
    if (spec.districts)
      for (int d = 1; d < spec.n_districts; ++d) f.values(i, c++) = r.district == d ? 1.0 : 0.0;
    for (int k = 0; k < n_controls; ++k) f.values(i, c++) = r.controls[static_cast<std::size_t>(k)];
  }
  return f;
}

inline TargetVector target_vector(const std::vector<ListingRecord>& listings, TargetLabel label) {
  TargetVector t;
  t.label = label;
  t.transform = TargetTransform::Log;
  t.values.resize(static_cast<Eigen::Index>(listings.size()));
  for (std::size_t i = 0; i < listings.size(); ++i) {
    const double v = label == TargetLabel::Rent ? listings[i].rent : listings[i].rpms;
    if (!(v > 0.0))
      fail(ErrorKind::NonPositiveTarget,
           std::string(to_string(label)) + " is not positive for listing id " + std::to_string(listings[i].id));
    t.values(static_cast<Eigen::Index>(i)) = std::log(v);
  }
  return t;
}

inline double sample_sd(const Eigen::VectorXd& v, double mean) {
  if (v.size() < 2) return 0.0;
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

// Column means and sample standard deviations.
inline std::vector<Standardization> fit_standardizer(const FeatureFrame& f) {
  std::vector<Standardization> out(f.cols());
  for (std::size_t j = 0; j < f.cols(); ++j) {
    const Eigen::VectorXd col = f.values.col(static_cast<Eigen::Index>(j));
    const double mean = col.mean();
    out[j] = {mean, sample_sd(col, mean)};
  }
  return out;
}

// Applies fitted standardization. A zero sd leaves the column centered only.
inline FeatureFrame apply_standardizer(const FeatureFrame& f, const std::vector<Standardization>& s) {
  require(s.size() == f.cols(), ErrorKind::ColumnMismatch, "standardizer width differs from frame");
  FeatureFrame out = f;
  for (std::size_t j = 0; j < f.cols(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double sd = s[j].sd > 0.0 ? s[j].sd : 1.0;
    out.values.col(jj) = (f.values.col(jj).array() - s[j].mean) / sd;
  }
  out.standardization = s;
  return out;
}

inline FeatureFrame drop_columns(const FeatureFrame& f, const std::vector<std::size_t>& drop) {
  FeatureFrame out;
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < f.cols(); ++j) {
    if (std::find(drop.begin(), drop.end(), j) != drop.end()) continue;
    keep.push_back(static_cast<Eigen::Index>(j));
    out.names.push_back(f.names[j]);
    out.kinds.push_back(f.kinds[j]);
  }
  out.values.resize(f.values.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.values.col(static_cast<Eigen::Index>(k)) = f.values.col(keep[k]);
  out.ids = f.ids;
  if (f.standardization) {
    std::vector<Standardization> s;
    for (auto j : keep) s.push_back((*f.standardization)[static_cast<std::size_t>(j)]);
    out.standardization = s;
  }
  return out;
}

// Drops dummy columns that are constant in this sample (e.g. a district absent
// from a subset); a constant continuous column is an error.
inline FeatureFrame drop_constant_dummies(const FeatureFrame& f) {
  std::vector<std::size_t> drop;
  for (std::size_t j = 0; j < f.cols(); ++j) {
    const auto col = f.values.col(static_cast<Eigen::Index>(j));
    if (f.rows() > 0 && col.maxCoeff() == col.minCoeff()) {
      if (f.kinds[j] == ColumnKind::Dummy)
        drop.push_back(j);
      else
        fail(ErrorKind::ConstantColumn, "column '" + f.names[j] + "' is constant");
    }
  }
  return drop.empty() ? f : drop_columns(f, drop);
}

inline FeatureFrame select_rows(const FeatureFrame& f, const std::vector<std::size_t>& rows) {
  FeatureFrame out;
  out.names = f.names;
  out.kinds = f.kinds;
  out.standardization = f.standardization;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), f.values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = f.values.row(static_cast<Eigen::Index>(rows[i]));
    if (!f.ids.empty()) out.ids.push_back(f.ids[rows[i]]);
  }
  return out;
}

inline Eigen::VectorXd select_rows(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(rows[i]));
  return out;
}

inline FeatureFrame append_column(const FeatureFrame& f, const std::string& name, const Eigen::VectorXd& values,
                                  ColumnKind kind = ColumnKind::Continuous) {
  require(values.size() == f.values.rows(), ErrorKind::ShapeMismatch, "column length differs from frame");
  require(!f.find(name), ErrorKind::InvalidArgument, "duplicate column '" + name + "'");
  FeatureFrame out = f;
  out.names.push_back(name);
  out.kinds.push_back(kind);
  out.values.conservativeResize(Eigen::NoChange, f.values.cols() + 1);
  out.values.col(f.values.cols()) = values;
  out.standardization.reset();
  return out;
}

// Log-transformed target and z-standardized design.
inline std::pair<FeatureFrame, TargetVector> build_frame(const std::vector<ListingRecord>& listings,
                                                         const VariableSpec& spec, TargetLabel label) {
  TargetVector y = target_vector(listings, label);
  FeatureFrame f = drop_constant_dummies(raw_frame(listings, spec));
  if (spec.standardize) f = apply_standardizer(f, fit_standardizer(f));
  return {std::move(f), std::move(y)};
}

}  // namespace hfl::stats
