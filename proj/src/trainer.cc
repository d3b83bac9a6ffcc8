// src/trainer.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "g2p/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "g2p/rng.h"

namespace g2p {
namespace {

constexpr int kEvalBatch = 128;

// One epoch of updates; returns train CE in nats per position.
using TrainEpochFn = std::function<double(int epoch, double lr)>;
// Full teacher-forced pass over the validation set.
using ValidFn = std::function<double()>;

void CheckFinite(double loss, int epoch, int minibatch) {
  G2P_CHECK(std::isfinite(loss), ErrorKind::kDivergence,
            "training diverged at epoch " << epoch << " minibatch "
                                          << minibatch);
}

TrainResult RunSchedule(const TrainSchedule& s, bool has_valid,
                        const TrainEpochFn& train_epoch, const ValidFn& validate,
                        const CheckpointSink& sink) {
  TrainResult result;
  double best = std::numeric_limits<double>::infinity();

  auto run_one = [&](int epoch, double lr) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_ce = train_epoch(epoch, lr);
    G2P_CHECK(std::isfinite(rec.train_ce), ErrorKind::kDivergence,
              "training diverged at epoch " << epoch);
    bool improved = true;
    if (has_valid) {
      rec.has_valid = true;
      rec.valid_ce = validate();
      G2P_CHECK(std::isfinite(rec.valid_ce), ErrorKind::kDivergence,
                "validation loss diverged at epoch " << epoch);
      improved = rec.valid_ce < best - s.improve_eps;
      if (improved) best = rec.valid_ce;
    }
    if (improved) result.best_epoch = epoch;
    result.history.push_back(rec);
    if (sink) sink(rec, improved);
    return improved;
  };

  if (s.mode == ScheduleMode::kPiecewise) {
    int epoch = 0;
    for (const LrSegment& seg : s.segments)
      for (int i = 0; i < seg.epochs; ++i) run_one(++epoch, seg.lr);
  } else {
    double lr = s.initial_lr;
    for (int epoch = 1; epoch <= s.max_epochs; ++epoch) {
      if (!run_one(epoch, lr)) lr *= 0.5;
      if (lr < s.initial_lr / s.lr_floor_div) break;
    }
  }
  return result;
}

std::map<size_t, std::vector<int>> LengthBuckets(
    const std::vector<AlignedExample>& examples) {
  std::map<size_t, std::vector<int>> buckets;
  for (int i = 0; i < static_cast<int>(examples.size()); ++i)
    buckets[examples[i].letters.size()].push_back(i);
  return buckets;
}

template <typename Chunked>
void ChunkInto(const std::vector<int>& order, int chunk, Chunked* out) {
  for (size_t start = 0; start < order.size(); start += chunk)
    out->emplace_back(order.begin() + start,
                      order.begin() +
                          std::min(order.size(), start + chunk));
}

}  // namespace

void TrainSchedule::Validate() const {
  G2P_CHECK(minibatch >= 1, ErrorKind::kConfig, "minibatch must be >= 1");
  G2P_CHECK(improve_eps >= 0.0, ErrorKind::kConfig,
            "improve_eps must be >= 0");
  if (mode == ScheduleMode::kValidationHalving) {
    G2P_CHECK(initial_lr > 0.0, ErrorKind::kConfig, "lr must be > 0");
    G2P_CHECK(max_epochs >= 1, ErrorKind::kConfig, "max_epochs must be >= 1");
    G2P_CHECK(lr_floor_div >= 1, ErrorKind::kConfig,
              "lr_floor_div must be >= 1");
  } else {
    G2P_CHECK(!segments.empty(), ErrorKind::kConfig,
              "piecewise schedule needs at least one segment");
    for (const LrSegment& seg : segments)
      G2P_CHECK(seg.epochs >= 1 && seg.lr > 0.0, ErrorKind::kConfig,
                "each segment needs epochs >= 1 and lr > 0");
  }
}

TrainResult TrainAlignModel(G2PModel<float>* model,
                            const std::vector<AlignedExample>& train,
                            const std::vector<AlignedExample>& valid,
                            const TrainSchedule& schedule,
                            const CheckpointSink& sink) {
  G2P_CHECK(model->config.arch != Arch::kEncDec, ErrorKind::kConfig,
            "alignment trainer needs a uni or bi model");
  schedule.Validate();
  G2P_CHECK(!train.empty(), ErrorKind::kConfig, "empty training set");
  const bool has_valid = !valid.empty();
  G2P_CHECK(has_valid || schedule.mode == ScheduleMode::kPiecewise,
            ErrorKind::kConfig,
            "validation-driven schedule needs a validation set");

  const ModelConfig& c = model->config;
  ParamSet<float> grads =
      ZeroParams<float>(c, model->letters.size(), model->phonemes.size());
  const auto train_buckets = LengthBuckets(train);
  const auto valid_buckets = LengthBuckets(valid);

  auto gather = [](const std::vector<AlignedExample>& pool,
                   const std::vector<int>& ids) {
    std::vector<AlignedExample> batch;
    batch.reserve(ids.size());
    for (int i : ids) batch.push_back(pool[i]);
    return batch;
  };

  auto train_epoch = [&](int epoch, double lr) {
    SeededRng rng(DeriveSeed(c.seed, static_cast<uint64_t>(epoch)));
    std::vector<std::vector<int>> minibatches;
    if (schedule.sort_by_length) {
      for (const auto& [len, ids] : train_buckets) {
        std::vector<int> order = ids;
        DeterministicShuffle(&order, &rng);
        ChunkInto(order, schedule.minibatch, &minibatches);
      }
    } else {
      std::vector<int> order(train.size());
      for (int i = 0; i < static_cast<int>(train.size()); ++i) order[i] = i;
      DeterministicShuffle(&order, &rng);
      ChunkInto(order, schedule.minibatch, &minibatches);
    }
    DeterministicShuffle(&minibatches, &rng);

    double total = 0.0;
    int64_t positions = 0;
    for (int m = 0; m < static_cast<int>(minibatches.size()); ++m) {
      ZeroParamSet(c, &grads);
      double loss = 0.0;
      if (schedule.sort_by_length) {
        AlignGraph<float> graph(model);
        loss = graph.Forward(gather(train, minibatches[m]));
        positions += graph.positions();
        graph.Backward(&grads);
      } else {
        for (int i : minibatches[m]) {
          AlignGraph<float> graph(model);
          loss += graph.Forward({train[i]});
          positions += graph.positions();
          graph.Backward(&grads);
        }
      }
      CheckFinite(loss, epoch, m);
      ApplySgd(c, &model->params, grads, static_cast<float>(lr),
               static_cast<float>(schedule.clip));
      total += loss;
    }
    return total / static_cast<double>(positions);
  };

  auto validate = [&]() {
    double total = 0.0;
    int64_t positions = 0;
    for (const auto& [len, ids] : valid_buckets) {
      std::vector<std::vector<int>> chunks;
      ChunkInto(ids, kEvalBatch, &chunks);
      for (const auto& chunk : chunks) {
        AlignGraph<float> graph(model);
        total += graph.Forward(gather(valid, chunk));
        positions += graph.positions();
      }
    }
    return total / static_cast<double>(positions);
  };

  return RunSchedule(schedule, has_valid, train_epoch, validate, sink);
}

TrainResult TrainEncDecModel(G2PModel<float>* model,
                             const std::vector<SeqExample>& train,
                             const std::vector<SeqExample>& valid,
                             const TrainSchedule& schedule,
                             const CheckpointSink& sink) {
  G2P_CHECK(model->config.arch == Arch::kEncDec, ErrorKind::kConfig,
            "enc-dec trainer needs an enc-dec model");
  schedule.Validate();
  G2P_CHECK(!train.empty(), ErrorKind::kConfig, "empty training set");
  const bool has_valid = !valid.empty();
  G2P_CHECK(has_valid || schedule.mode == ScheduleMode::kPiecewise,
            ErrorKind::kConfig,
            "validation-driven schedule needs a validation set");

  const ModelConfig& c = model->config;
  ParamSet<float> grads =
      ZeroParams<float>(c, model->letters.size(), model->phonemes.size());

  auto train_epoch = [&](int epoch, double lr) {
    SeededRng rng(DeriveSeed(c.seed, static_cast<uint64_t>(epoch)));
    std::vector<int> order(train.size());
    for (int i = 0; i < static_cast<int>(train.size()); ++i) order[i] = i;
    DeterministicShuffle(&order, &rng);
    std::vector<std::vector<int>> minibatches;
    ChunkInto(order, schedule.minibatch, &minibatches);

    double total = 0.0;
    int64_t positions = 0;
    for (int m = 0; m < static_cast<int>(minibatches.size()); ++m) {
      ZeroParamSet(c, &grads);
      double loss = 0.0;
      for (int i : minibatches[m]) {
        EncDecGraph<float> graph(model);
        loss += graph.Forward(train[i]);
        positions += graph.positions();
        graph.Backward(&grads);
      }
      CheckFinite(loss, epoch, m);
      ApplySgd(c, &model->params, grads, static_cast<float>(lr),
               static_cast<float>(schedule.clip));
      total += loss;
    }
    return total / static_cast<double>(positions);
  };

  auto validate = [&]() {
    double total = 0.0;
    int64_t positions = 0;
    for (const SeqExample& ex : valid) {
      EncDecGraph<float> graph(model);
      total += graph.Forward(ex);
      positions += graph.positions();
    }
    return total / static_cast<double>(positions);
  };

  return RunSchedule(schedule, has_valid, train_epoch, validate, sink);
}

}  // namespace g2p
