#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "regait/linalg.hpp"

namespace regait::tools {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void ensure_dir(const std::string& dir);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

// One per run; written last so wall-clock time covers the whole command.
class Manifest {
 public:
  Manifest(std::string subcommand, std::string out_dir);
  nlohmann::json& options() { return options_; }
  void set_params_file(std::string path) { params_file_ = std::move(path); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_output(const std::string& name) { outputs_.push_back(name); }
  void write() const;

 private:
  std::string subcommand_, out_dir_, params_file_;
  std::uint64_t seed_ = 0;
  nlohmann::json options_ = nlohmann::json::object();
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

struct Series {
  std::string label;
  std::string color;
  Vec x, y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::vector<Series> series;
};

// Panels stacked vertically; axes span the data of each panel with 5% margin.
std::string render_svg(const std::string& title, const std::vector<Panel>& panels);

int thread_budget();

}  // namespace regait::tools
