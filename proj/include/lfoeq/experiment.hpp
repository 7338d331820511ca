#ifndef LFOEQ_EXPERIMENT_HPP_
#define LFOEQ_EXPERIMENT_HPP_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lfoeq/config.hpp"
#include "lfoeq/imitation.hpp"

namespace lfoeq {

// Learning-curve CSV: '#'-prefixed key=value metadata header, then the
// columns env_steps, eval_return_mean, eval_return_std, disc_loss, policy_kl.
void write_curve_csv(const std::string& path,
                     const std::map<std::string, std::string>& metadata,
                     const LearningCurve& curve);

struct CurveFile {
  std::map<std::string, std::string> metadata;
  std::vector<CurvePoint> points;
};
CurveFile read_curve_csv(const std::string& path);

struct PlotSeries {
  std::string label;
  std::vector<double> steps;
  std::vector<double> mean;
  std::vector<double> std_dev;
};

// Solid mean line with a shaded +-std band per series, x axis environment
// steps.
void emit_plot_svg(const std::string& path, const std::string& title,
                   const std::vector<PlotSeries>& series);

// mean line over per-seed curves, band = across-seed std at each step
PlotSeries aggregate_curves(const std::string& label,
                            const std::vector<LearningCurve>& curves);

// Commands: expert | imitate | ablate | analyze | tabular-verify | report.
// Non-zero exit with one diagnostic line per failed validation.
int run_command(const std::string& command, const ExperimentConfig& config,
                std::ostream& log);

std::string default_dataset_path(const ExperimentConfig& config);

}  // namespace lfoeq

#endif  // LFOEQ_EXPERIMENT_HPP_
