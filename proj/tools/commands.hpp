#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace regait::tools {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string out;
  std::uint64_t seed = 7;
  std::string params;
  std::optional<double> dt;
  std::optional<double> tol;
  std::optional<int> order;
  std::optional<int> iters;
};

struct CrawlerOptions {
  CommonOptions common;
  int jam = 1;
  double duration = 1.0;
  bool search = false;
};

struct CTSlipOptions {
  CommonOptions common;
  std::string mode;  // simulate, damage, recover
  std::string nominal_params;
  int ensemble = 10;
  int strides = 10;
};

struct ManipulatorOptions {
  CommonOptions common;
  double duration = 5.0;
  double strength = 0.5;
};

struct LearnOptions {
  CommonOptions common;
  std::string input;
};

struct RankOptions {
  CommonOptions common;
  int n = 9;
  int k = 5;
  int trials = 1000;
  int max_count = 0;  // 0: bound + 1
};

// Name of the pipeline stage running now, for error reports.
const std::string& current_stage();

int cmd_crawler(const CrawlerOptions& o);
int cmd_ctslip(const CTSlipOptions& o);
int cmd_manipulator(const ManipulatorOptions& o);
int cmd_learn(const LearnOptions& o);
int cmd_rank(const RankOptions& o);

}  // namespace regait::tools
