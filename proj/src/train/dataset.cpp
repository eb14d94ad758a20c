#include "train/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "common/error.hpp"

namespace nd::train {

std::size_t WindowedDataset::positives() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

WindowedDataset window_dataset(const synth::Recording& rec, std::size_t window_len, std::size_t stride) {
    if (rec.samples.empty()) throw Error(ErrorCode::InvalidArgument, "recording is empty");
    if (window_len == 0 || stride == 0) throw Error(ErrorCode::InvalidArgument, "window_len and stride must be >= 1");
    if (rec.samples.size() < window_len)
        throw Error(ErrorCode::InvalidArgument, "recording is shorter than one window");

    const auto inside = synth::sample_labels(rec);
    std::vector<std::size_t> prefix(inside.size() + 1, 0);
    for (std::size_t i = 0; i < inside.size(); ++i) prefix[i + 1] = prefix[i] + inside[i];

    WindowedDataset ds;
    ds.window_len = window_len;
    for (std::size_t start = 0; start + window_len <= rec.samples.size(); start += stride) {
        for (std::size_t j = 0; j < window_len; ++j) ds.windows.push_back(rec.normalized(start + j));
        const std::size_t in_event = prefix[start + window_len] - prefix[start];
        ds.labels.push_back(2 * in_event >= window_len ? 1 : 0);
        ds.starts.push_back(start);
    }
    return ds;
}

WindowedDataset subset(const WindowedDataset& ds, std::span<const std::size_t> rows) {
    WindowedDataset out;
    out.window_len = ds.window_len;
    out.windows.reserve(rows.size() * ds.window_len);
    for (auto r : rows) {
        const auto w = ds.window(r);
        out.windows.insert(out.windows.end(), w.begin(), w.end());
        out.labels.push_back(ds.labels[r]);
        out.starts.push_back(ds.starts[r]);
    }
    return out;
}

WindowedDataset rebalance(const WindowedDataset& ds, double neg_pos_ratio, std::uint64_t seed) {
    if (!(neg_pos_ratio >= 1.0)) throw Error(ErrorCode::InvalidArgument, "negative:positive ratio must be >= 1");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < ds.size(); ++i) (ds.labels[i] ? pos : neg).push_back(i);
    if (pos.empty()) throw Error(ErrorCode::InvalidArgument, "dataset has no positive windows");
    if (neg.empty()) throw Error(ErrorCode::InvalidArgument, "dataset has no negative windows");

    const auto want = static_cast<std::size_t>(std::llround(neg_pos_ratio * static_cast<double>(pos.size())));
    if (want < neg.size()) {
        std::mt19937_64 rng(seed);
        std::shuffle(neg.begin(), neg.end(), rng);
        neg.resize(want);
    }
    std::vector<std::size_t> keep = pos;
    keep.insert(keep.end(), neg.begin(), neg.end());
    std::sort(keep.begin(), keep.end());
    return subset(ds, keep);
}

Split split_dataset(const WindowedDataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0, 1)");
    if (ds.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two windows to split");

    Split out;
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train_rows, val_rows;
    for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (ds.labels[i] == cls) rows.push_back(i);
        if (rows.empty()) continue;
        if (rows.size() < 2) {
            out.warnings.push_back("class " + std::to_string(cls) + " has " + std::to_string(rows.size()) +
                                   " member(s); assigned wholly to training");
            train_rows.insert(train_rows.end(), rows.begin(), rows.end());
            continue;
        }
        std::shuffle(rows.begin(), rows.end(), rng);
        const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(rows.size())));
        train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
        val_rows.insert(val_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(val_rows.begin(), val_rows.end());
    out.train = subset(ds, train_rows);
    out.validation = subset(ds, val_rows);
    return out;
}

}  // namespace nd::train
