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

#include "svnvs/recurrent.hpp"

namespace svnvs {

ConvLstmCellImpl::ConvLstmCellImpl(int64_t input_channels, int64_t hidden_channels,
                                   int64_t kernel_size)
    : hidden_channels_(hidden_channels) {
  gates_ = register_module(
      "gates", torch::nn::Conv2d(torch::nn::Conv2dOptions(input_channels + hidden_channels,
                                                          4 * hidden_channels, kernel_size)
                                     .padding(kernel_size / 2)));
}

LstmState ConvLstmCellImpl::forward(const torch::Tensor& input, const LstmState& state) {
  torch::Tensor h = state.hidden, c = state.cell;
  if (!h.defined()) {
    h = torch::zeros({input.size(0), hidden_channels_, input.size(2), input.size(3)},
                     input.options());
    c = torch::zeros_like(h);
  }
  auto gates = gates_->forward(torch::cat({input, h}, 1)).chunk(4, 1);
  auto in_gate = torch::sigmoid(gates[0]);
  auto forget_gate = torch::sigmoid(gates[1]);
  auto out_gate = torch::sigmoid(gates[2]);
  auto candidate = torch::tanh(gates[3]);
  auto next_c = forget_gate * c + in_gate * candidate;
  return {out_gate * torch::tanh(next_c), next_c};
}

}  // namespace svnvs
