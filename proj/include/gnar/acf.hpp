#pragma once

#include "gnar/network.hpp"
#include "gnar/simulate.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

namespace gnar {

// Heuristic +-3/sqrt(dT) white-noise band.
inline double white_noise_band(int d, int T) { return 3.0 / std::sqrt(static_cast<double>(d) * T); }

// Optional community restriction: c = -1 means the whole network.
struct AcfScope {
  const CommunityPartition* partition = nullptr;
  int community = -1;
};

double nacf(const Realization& real, const WeightsMatrix& W, const StageSet& stages, int h, int r,
            AcfScope scope = {});
double pnacf(const Realization& real, const WeightsMatrix& W, const StageSet& stages, int h, int r,
             AcfScope scope = {});

enum class AcfKind { Nacf, Pnacf };

struct CorbitRow {
  int lag = 1;
  int stage = 1;
  int community = 0;  // 0: whole network, 1..C: community, -1: community mean
  double value = 0.0;
};

struct CorbitTable {
  AcfKind kind = AcfKind::Nacf;
  int max_lag = 0;
  int max_stage = 0;
  int T = 0;
  int d = 0;
  int C = 0;  // 0 for a plain Corbit table
  std::vector<CorbitRow> rows;
};

std::string kind_name(AcfKind kind);

// With a partition, rows are per community plus the mean row for every (h, r).
CorbitTable corbit_data(const Realization& real, const WeightsMatrix& W, const StageSet& stages,
                        int max_h, int max_r, AcfKind kind,
                        const CommunityPartition* part = nullptr);

std::string corbit_csv(const CorbitTable& table);

struct CorbitStyle {
  int size = 520;
  double value_limit = 0.0;  // 0: symmetric limit from the data
  std::string title;
};

std::string render_corbit_svg(const CorbitTable& table, const CorbitStyle& style = {});

struct CrossCorrelation {
  Eigen::MatrixXd values;      // (i, j) = corr(X_{i,t+h}, X_{j,t})
  bool diagonal_masked = true;  // display hint: diagonal drawn grey
};

CrossCorrelation cross_correlation(const Realization& real, int h);

}  // namespace gnar
