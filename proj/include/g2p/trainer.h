// include/g2p/trainer.h
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
//
// Epoch-level SGD driver. Two learning-rate schedules:
//   validation halving: the rate halves whenever validation cross-entropy
//     fails to improve on the best seen so far by more than improve_eps
//     nats per position; training stops once the rate drops below
//     initial_lr / lr_floor_div or max_epochs is reached.
//   piecewise: a fixed list of (epochs, lr) segments, run in order; usable
//     without a validation set.
// Minibatch gradients are summed over examples, clipped elementwise, and
// applied in one SGD step per minibatch.

#ifndef G2P_TRAINER_H_
#define G2P_TRAINER_H_

#include <functional>
#include <vector>

#include "g2p/graph.h"
#include "g2p/model.h"

namespace g2p {

enum class ScheduleMode { kValidationHalving, kPiecewise };

struct LrSegment {
  int epochs = 0;
  double lr = 0.0;
};

struct TrainSchedule {
  ScheduleMode mode = ScheduleMode::kValidationHalving;
  double initial_lr = 0.1;          // validation-halving mode
  std::vector<LrSegment> segments;  // piecewise mode
  int minibatch = 100;
  int max_epochs = 100;  // validation-halving cap
  // Alignment models only: build each minibatch from same-length examples
  // and run it as one batched graph. Off, every example runs on its own
  // graph and gradients are summed per minibatch. Ignored by enc-dec, which
  // always runs per example without length grouping.
  bool sort_by_length = true;
  double clip = 1.0;
  double improve_eps = 1e-4;
  int lr_floor_div = 1024;

  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_ce = 0.0;
  double valid_ce = 0.0;
  bool has_valid = false;
  double lr = 0.0;  // rate used during this epoch
};

// Called after every epoch's update pass. is_best marks a new best
// validation cross-entropy; without a validation set every epoch is "best",
// so the last checkpoint wins.
using CheckpointSink =
    std::function<void(const EpochRecord& epoch, bool is_best)>;

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

// Trains a uni or bi model on encoded aligned examples in place.
TrainResult TrainAlignModel(G2PModel<float>* model,
                            const std::vector<AlignedExample>& train,
                            const std::vector<AlignedExample>& valid,
                            const TrainSchedule& schedule,
                            const CheckpointSink& sink = nullptr);

// Trains an enc-dec model on encoded (letters, phonemes) examples in place.
TrainResult TrainEncDecModel(G2PModel<float>* model,
                             const std::vector<SeqExample>& train,
                             const std::vector<SeqExample>& valid,
                             const TrainSchedule& schedule,
                             const CheckpointSink& sink = nullptr);

}  // namespace g2p

#endif  // G2P_TRAINER_H_
