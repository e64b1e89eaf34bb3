#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "levylab/assumptions.hpp"
#include "levylab/estimators.hpp"
#include "levylab/frozen.hpp"
#include "levylab/paths.hpp"

namespace levylab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

// Shortest round-trippable decimal form; keeps artifacts byte-stable.
std::string format_double(double v);

// Minimal CSV writer with a fixed header line and %.17g numeric cells.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::FILE* file_;
};

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const Json& body);

Json to_json(const AssumptionReport& report);
Json to_json(const MartingaleReport& report);
Json to_json(const PerturbationGapReport& report);
Json to_json(const TauChainStats& stats);
Json to_json(const ExitTimeReport& report);
Json to_json(const ResolventContinuityReport& report);

}  // namespace levylab
