// Copyright 2026 The CEGI Authors
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

#include "cegi/injection/injection.h"

#include <stdexcept>

#include "cegi/encoder/vocabulary.h"
#include "cegi/numerics/ops.h"

namespace cegi {
namespace {

constexpr int kPairs = 9;

int PairIndex(Part anchor, int slot) {
  const int a = static_cast<int>(anchor);
  if (a > 2 || slot < 0 || slot > 2) {
    throw std::out_of_range("no relation pair for anchor " +
                            std::to_string(a) + " slot " +
                            std::to_string(slot));
  }
  return a * 3 + slot;
}

const Tensor& PartFeatures(const EncoderOutput& encoded, Part part) {
  switch (part) {
    case Part::kParagraph:
      return encoded.paragraph;
    case Part::kQuestion:
      return encoded.question;
    case Part::kOption:
      return encoded.option;
    case Part::kEvidence:
      return encoded.evidence;
  }
  throw std::logic_error("unreachable part");
}

const Segment& PartSegment(const PackedInput& layout, Part part) {
  switch (part) {
    case Part::kParagraph:
      return layout.paragraph;
    case Part::kQuestion:
      return layout.question;
    case Part::kOption:
      return layout.option;
    case Part::kEvidence:
      return layout.evidence;
  }
  throw std::logic_error("unreachable part");
}

std::vector<char> ValidColumns(const PackedInput& layout, Part part) {
  const Segment& seg = PartSegment(layout, part);
  std::vector<char> valid(seg.width);
  for (int64_t i = 0; i < seg.width; ++i) {
    valid[i] = layout.ids[seg.begin + i] != kPadId;
  }
  return valid;
}

}  // namespace

AttentionResult BilinearAttend(const Tensor& target, const Tensor& source,
                               const AttentionParams& params,
                               std::span<const char> source_valid) {
  const int64_t d = target.rows();
  if (source.rows() != d || params.bilinear.rows() != d ||
      params.bilinear.cols() != d) {
    throw ShapeError("bilinear attention: target " +
                     ShapeToString(target.shape()) + ", source " +
                     ShapeToString(source.shape()) + ", W_g " +
                     ShapeToString(params.bilinear.shape()));
  }
  const int64_t a = target.cols();
  const int64_t b = source.cols();
  if (!source_valid.empty() && static_cast<int64_t>(source_valid.size()) != b) {
    throw ShapeError("bilinear attention: mask of " +
                     std::to_string(source_valid.size()) + " for " +
                     std::to_string(b) + " source columns");
  }
  bool any_valid = b > 0;
  if (!source_valid.empty()) {
    any_valid = false;
    for (char v : source_valid) any_valid = any_valid || v;
  }
  if (!any_valid) {
    return {Tensor::Zeros({a, 0}), Tensor::Zeros({d, a})};
  }
  Tensor logits = MatMul(MatMul(Transpose(target), params.bilinear), source);
  if (!source_valid.empty()) {
    std::vector<double> mask(a * b, 0.0);
    for (int64_t i = 0; i < a; ++i) {
      for (int64_t j = 0; j < b; ++j) {
        if (!source_valid[j]) mask[i * b + j] = kMaskedLogit;
      }
    }
    logits = AddConstant(logits, mask);
  }
  Tensor scores = Softmax(logits, 1);
  Tensor mixed = MatMul(source, Transpose(scores));
  return {scores, mixed};
}

Tensor CoMatch(const Tensor& mixed, const Tensor& anchor,
               const CoMatchParams& params) {
  if (mixed.shape() != anchor.shape()) {
    throw ShapeError("co-matching: G " + ShapeToString(mixed.shape()) +
                     " vs H " + ShapeToString(anchor.shape()));
  }
  const Tensor stacked[] = {Sub(mixed, anchor), Mul(mixed, anchor)};
  return Relu(
      AddBias(MatMul(params.weight, ConcatRows(stacked)), params.bias));
}

Part PartnerOf(Part anchor, int slot) {
  static constexpr Part kPartners[3][3] = {
      {Part::kQuestion, Part::kOption, Part::kEvidence},
      {Part::kParagraph, Part::kOption, Part::kEvidence},
      {Part::kParagraph, Part::kQuestion, Part::kEvidence},
  };
  return kPartners[PairIndex(anchor, slot) / 3][slot];
}

InjectionParams::InjectionParams(int64_t dim, bool share_across_pairs,
                                 ParameterSet& params,
                                 const std::string& prefix, Rng& rng) {
  const int count = share_across_pairs ? 1 : kPairs;
  for (int i = 0; i < count; ++i) {
    const std::string suffix =
        share_across_pairs ? "" : "." + std::to_string(i);
    attention_.push_back(
        {params.AddXavier(prefix + ".bilinear" + suffix, {dim, dim}, rng)});
    comatch_.push_back(
        {params.AddXavier(prefix + ".comatch_weight" + suffix, {dim, 2 * dim},
                          rng),
         params.Add(prefix + ".comatch_bias" + suffix, {dim, 1})});
  }
}

InjectionParams::InjectionParams(std::vector<AttentionParams> attention,
                                 std::vector<CoMatchParams> comatch)
    : attention_(std::move(attention)), comatch_(std::move(comatch)) {
  auto ok = [](size_t n) { return n == 1 || n == kPairs; };
  if (!ok(attention_.size()) || !ok(comatch_.size()) ||
      attention_.size() != comatch_.size()) {
    throw std::invalid_argument(
        "injection parameters need 1 shared or 9 per-pair entries");
  }
}

const AttentionParams& InjectionParams::attention(Part anchor,
                                                  int slot) const {
  return shared() ? attention_[0] : attention_[PairIndex(anchor, slot)];
}

const CoMatchParams& InjectionParams::comatch(Part anchor, int slot) const {
  return shared() ? comatch_[0] : comatch_[PairIndex(anchor, slot)];
}

Relations BuildRelations(const EncoderOutput& encoded,
                         const InjectionParams& params) {
  Relations relations;
  for (Part anchor : {Part::kParagraph, Part::kQuestion, Part::kOption}) {
    for (int slot = 0; slot < 3; ++slot) {
      const Part partner = PartnerOf(anchor, slot);
      const std::vector<char> valid = ValidColumns(encoded.layout, partner);
      relations.mixed[static_cast<int>(anchor)][slot] =
          BilinearAttend(PartFeatures(encoded, anchor),
                         PartFeatures(encoded, partner),
                         params.attention(anchor, slot), valid)
              .mixed;
    }
  }
  return relations;
}

OptionBlock BuildOptionBlock(const EncoderOutput& encoded,
                             const InjectionParams& params) {
  const Relations relations = BuildRelations(encoded, params);
  std::array<Tensor, 3> per_anchor;
  for (Part anchor : {Part::kParagraph, Part::kQuestion, Part::kOption}) {
    const Tensor& h = PartFeatures(encoded, anchor);
    std::array<Tensor, 3> matched;
    for (int slot = 0; slot < 3; ++slot) {
      matched[slot] = CoMatch(relations.at(anchor, slot), h,
                              params.comatch(anchor, slot));
    }
    per_anchor[static_cast<int>(anchor)] = ConcatRows(matched);
  }
  OptionBlock block;
  block.paragraph = per_anchor[0];
  block.question = per_anchor[1];
  block.option = per_anchor[2];
  block.combined = ConcatCols(per_anchor);
  return block;
}

FinalRepresentation AssembleFinal(std::span<const OptionBlock> blocks) {
  if (blocks.empty()) throw ShapeError("no option blocks to assemble");
  FinalRepresentation out;
  out.layout.options = static_cast<int64_t>(blocks.size());
  out.layout.paragraph_width = blocks[0].paragraph.cols();
  out.layout.question_width = blocks[0].question.cols();
  out.layout.option_width = blocks[0].option.cols();
  std::vector<Tensor> parts;
  parts.reserve(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    const OptionBlock& block = blocks[i];
    if (block.paragraph.cols() != out.layout.paragraph_width ||
        block.question.cols() != out.layout.question_width ||
        block.option.cols() != out.layout.option_width) {
      throw ShapeError("option block " + std::to_string(i) +
                       " widths differ from block 0");
    }
    parts.push_back(block.combined);
  }
  out.features = ConcatCols(parts);
  return out;
}

}  // namespace cegi
