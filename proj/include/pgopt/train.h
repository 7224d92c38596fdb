#ifndef PGOPT_TRAIN_H_
#define PGOPT_TRAIN_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pgopt/datagen.h"
#include "pgopt/losses.h"
#include "pgopt/model.h"
#include "pgopt/oracle.h"

namespace pgopt {

struct TrainConfig {
  int epochs = 100;
  int batch = 32;
  double lr = 0.01;
  int val_size = 200;
  // Empty means the automatic grid {c / sqrt(n_train) : c in {0.25, 1, 4, 16}} + {0.001}.
  std::vector<double> h_grid;
  uint64_t seed = 0;
  bool warm_start = true;
};

struct TrainReport {
  LinearModel best_model;
  // Parameters after the last epoch.
  LinearModel final_model;
  // Index into val_curve of the first minimum; val_curve[k] is the mean
  // validation decision loss after epoch k + 1.
  int best_epoch = 0;
  std::optional<double> chosen_h;
  std::vector<double> val_curve;

  double best_val_loss() const { return val_curve.at(static_cast<size_t>(best_epoch)); }
};

enum class Method { kEto, kSpoPlus, kPgb, kPgc, kPgf };

std::string MethodName(Method method);
Method ParseMethod(const std::string& name);
bool IsPgMethod(Method method);
LossTag MethodLossTag(Method method);

// Mean decision loss y' pi(f(x)) over a dataset.
double MeanDecisionLoss(const LinearModel& model, const Dataset& data, const Oracle& oracle);

// Minibatch Adam on `loss` starting from `init`, reshuffling every epoch and
// keeping the epoch with the lowest validation decision loss.
TrainReport Fit(const Dataset& train, const Dataset& val, const LossKind& loss,
                const Oracle& oracle, const TrainConfig& config, const LinearModel& init);

std::vector<double> AutoHGrid(int n_train);

// Runs Fit for every h of the grid (config.h_grid, or the automatic grid) and
// returns the run with the lowest validation decision loss, smaller h winning
// ties.
TrainReport SelectH(const Dataset& train, const Dataset& val, LossTag pg_tag,
                    const Oracle& oracle, const TrainConfig& config, const LinearModel& init);

// Closed-form least squares with intercept (ridge 1e-8), one output at a time.
LinearModel FitEto(const Dataset& train);

// Splits the last config.val_size rows off as validation and runs `method`.
// PG methods start from the SPO+ pipeline's best model when warm_start is
// set; pass `spo_warm_start` to reuse an already computed SPO+ report on the
// same split and seed.
TrainReport Pipeline(const Dataset& data, Method method, const Oracle& oracle,
                     const TrainConfig& config,
                     const TrainReport* spo_warm_start = nullptr);

}  // namespace pgopt

#endif  // PGOPT_TRAIN_H_
