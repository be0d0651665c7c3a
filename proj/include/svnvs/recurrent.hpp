// Copyright 2026 The SVNVS Authors
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

#pragma once

#include <torch/torch.h>

namespace svnvs {

/// Hidden and cell activations of a convolutional LSTM. Undefined tensors
/// stand for the all-zero initial state at the first depth plane.
struct LstmState {
  torch::Tensor hidden;
  torch::Tensor cell;
};

/// Convolutional LSTM cell. With kernel_size 1 it is an independent LSTM per
/// pixel with weights shared across pixels.
class ConvLstmCellImpl : public torch::nn::Module {
 public:
  ConvLstmCellImpl(int64_t input_channels, int64_t hidden_channels, int64_t kernel_size);

  LstmState forward(const torch::Tensor& input, const LstmState& state);

  int64_t hidden_channels() const { return hidden_channels_; }

 private:
  int64_t hidden_channels_;
  torch::nn::Conv2d gates_{nullptr};
};
TORCH_MODULE(ConvLstmCell);

}  // namespace svnvs
