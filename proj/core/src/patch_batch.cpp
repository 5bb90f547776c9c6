#include "poolnet/patch_batch.hpp"

#include <algorithm>
#include <string>

#include "poolnet/errors.hpp"

namespace poolnet {

PatchBatch PatchBatch::from_samples(std::span<const LabeledSample> samples, const PatternSet* ps) {
  PatchBatch batch;
  if (samples.empty()) {
    if (ps) batch.table = ps->matrix();
    return batch;
  }
  const int n = samples.front().patch_count();
  const std::size_t d = samples.front().patches.cols();
  if (ps && static_cast<std::size_t>(ps->dimension()) != d) {
    throw DimensionError("PatchBatch: pattern dimension does not match patches");
  }
  batch.patch_count = n;
  batch.labels.reserve(samples.size());
  batch.patch_rows.reserve(samples.size() * static_cast<std::size_t>(n));

  std::vector<double> values;
  std::size_t rows = 0;
  if (ps) {
    values.assign(ps->matrix().values().begin(), ps->matrix().values().end());
    rows = static_cast<std::size_t>(ps->count());
  }

  for (const auto& s : samples) {
    if (s.patch_count() != n || s.patches.cols() != d) {
      throw DimensionError("PatchBatch: samples have inconsistent shapes");
    }
    batch.labels.push_back(s.label);
    for (int j = 0; j < n; ++j) {
      auto patch = s.patches.row(static_cast<std::size_t>(j));
      const int id = j < static_cast<int>(s.slot_pattern_ids.size())
                         ? s.slot_pattern_ids[static_cast<std::size_t>(j)]
                         : -1;
      if (ps && id >= 0 && id < ps->count()) {
        auto pattern = ps->pattern(id);
        if (std::equal(patch.begin(), patch.end(), pattern.begin())) {
          batch.patch_rows.push_back(id);
          continue;
        }
      }
      values.insert(values.end(), patch.begin(), patch.end());
      batch.patch_rows.push_back(static_cast<int>(rows++));
    }
  }
  batch.table = Matrix(rows, d, std::move(values));
  return batch;
}

PatchBatch PatchBatch::from_dataset(const Dataset& ds) {
  return from_samples(ds.samples, ds.patterns.get());
}

PatchBatch PatchBatch::select(std::span<const int> sample_ids) const {
  PatchBatch out;
  out.patch_count = patch_count;
  const std::size_t d = table.cols();
  std::vector<int> remap(table.rows(), -1);
  std::vector<double> values;
  int used = 0;
  out.labels.reserve(sample_ids.size());
  out.patch_rows.reserve(sample_ids.size() * static_cast<std::size_t>(patch_count));
  for (int id : sample_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= samples()) {
      throw DimensionError("PatchBatch::select: sample index out of range");
    }
    out.labels.push_back(labels[static_cast<std::size_t>(id)]);
    for (int r : rows_of(static_cast<std::size_t>(id))) {
      int& target = remap[static_cast<std::size_t>(r)];
      if (target < 0) {
        target = used++;
        auto src = table.row(static_cast<std::size_t>(r));
        values.insert(values.end(), src.begin(), src.end());
      }
      out.patch_rows.push_back(target);
    }
  }
  out.table = Matrix(static_cast<std::size_t>(used), d, std::move(values));
  return out;
}

Vector PatchBatch::flat(std::size_t sample) const {
  const std::size_t d = table.cols();
  Vector x(static_cast<std::size_t>(patch_count) * d);
  auto rows = rows_of(sample);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    auto r = table.row(static_cast<std::size_t>(rows[j]));
    std::copy(r.begin(), r.end(), x.begin() + static_cast<std::ptrdiff_t>(j * d));
  }
  return x;
}

Matrix PatchBatch::flat_matrix() const {
  const std::size_t width = static_cast<std::size_t>(patch_count) * table.cols();
  Matrix x(samples(), width);
  for (std::size_t s = 0; s < samples(); ++s) {
    const Vector row = flat(s);
    std::copy(row.begin(), row.end(), x.row(s).begin());
  }
  return x;
}

}  // namespace poolnet
