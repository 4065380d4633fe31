#pragma once

#include <string>
#include <vector>

#include "hfl/cli/commands.hpp"
#include "hfl/cli/config.hpp"
#include "hfl/pipeline/study.hpp"

#ifndef HFL_CONFIG_DIR
#define HFL_CONFIG_DIR "configs"
#endif

namespace hfl::testing {

// Stage-2 settings used for the planted-market studies.
inline cli::RunConfig recovery_config() { return cli::load_config(std::string(HFL_CONFIG_DIR) + "/recovery.json"); }

struct SyntheticStudy {
  Market market;
  std::vector<GrayImage> images;
  pipeline::StudyReport report;
};

inline SyntheticStudy run_synthetic(const MarketConfig& mc, pipeline::StudyConfig sc) {
  SyntheticStudy s;
  s.market = generate_market(mc);
  s.images = cli::render_plans(s.market, mc.raster_size);
  s.report = pipeline::run_study(s.market.listings, s.images, s.market.truth, sc);
  return s;
}

}  // namespace hfl::testing
