#ifndef LFOEQ_CONFIG_HPP_
#define LFOEQ_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lfoeq {

// Flat key=value experiment configuration with '#' comments and dotted
// section prefixes (imitation.max_kl=0.01). Every key must appear in the
// built-in registry of known keys; the fully resolved map is written next to
// each run's outputs.
class ExperimentConfig {
 public:
  ExperimentConfig();  // registry defaults

  static ExperimentConfig from_file(const std::string& path);

  void apply_override(const std::string& key_equals_value);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_long(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<long> get_long_list(const std::string& key) const;

  void write_resolved(const std::string& path) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace lfoeq

#endif  // LFOEQ_CONFIG_HPP_
