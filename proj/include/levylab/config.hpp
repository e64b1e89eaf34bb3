#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "levylab/kernel.hpp"
#include "levylab/paths.hpp"

namespace levylab {

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat INI-style configuration: [section] headers, key = value lines,
// '#'/';' comments. Values stay strings until queried.
class IniConfig {
 public:
  static IniConfig parse_file(const std::string& path);
  static IniConfig parse_string(const std::string& text,
                                const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::string require(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);

  // Sorted section.key=value serialization; the experiment identity.
  std::string canonical() const;
  std::uint64_t hash() const;  // FNV-1a 64 of the canonical form
  std::string hash_hex() const;

  const std::map<std::string, std::map<std::string, std::string>>& sections()
      const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Kernel assembly from the [kernel]/[profile]/[tail]/[perturbation]/[modulus]
// sections; a preset name short-circuits the piecewise assembly.
StateKernel build_kernel(const IniConfig& cfg);

PathConfig build_path_config(const IniConfig& cfg);

}  // namespace levylab
