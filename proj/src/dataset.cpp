#include "pairlearn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "pairlearn/error.hpp"
#include "pairlearn/rng.hpp"

namespace pairlearn {

namespace {

double parse_double_cell(const std::string& cell, std::size_t row_number) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw FormatError("dataset CSV row " + std::to_string(row_number) +
                          ": non-numeric cell '" + cell + "'");
    }
    return v;
}

long long parse_label_cell(const std::string& cell, std::size_t row_number) {
    long long v = 0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw FormatError("dataset CSV row " + std::to_string(row_number) +
                          ": label is not an integer: '" + cell + "'");
    }
    if (v < 0) {
        throw FormatError("dataset CSV row " + std::to_string(row_number) + ": negative label");
    }
    return v;
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

struct RawCsv {
    Matrix features;
    std::vector<int> labels; // empty when no label column
};

RawCsv read_csv(const std::string& path, bool has_label_column) {
    std::ifstream in(path);
    if (!in) throw FormatError("dataset CSV: cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string line;
    std::size_t row_number = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++row_number;
        if (line.empty()) {
            throw FormatError("dataset CSV row " + std::to_string(row_number) + ": empty row");
        }
        const std::vector<std::string> cells = split_cells(line);
        if (width == 0) {
            width = cells.size();
            if (has_label_column && width < 2) {
                throw FormatError("dataset CSV: need at least one feature and a label column");
            }
        } else if (cells.size() != width) {
            throw FormatError("dataset CSV row " + std::to_string(row_number) +
                              ": ragged row (expected " + std::to_string(width) + " cells)");
        }
        const std::size_t feat_count = has_label_column ? width - 1 : width;
        std::vector<double> feats(feat_count);
        for (std::size_t c = 0; c < feat_count; ++c) {
            feats[c] = parse_double_cell(cells[c], row_number);
        }
        rows.push_back(std::move(feats));
        if (has_label_column) {
            labels.push_back(static_cast<int>(parse_label_cell(cells[width - 1], row_number)));
        }
    }
    if (rows.empty()) throw FormatError("dataset CSV: '" + path + "' is empty");

    RawCsv out;
    out.features = Matrix(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) out.features(r, c) = rows[r][c];
    }
    out.labels = std::move(labels);
    return out;
}

void append_double(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

void validate_labeled(const LabeledDataset& ds) {
    if (ds.features.rows != ds.labels.size()) {
        throw FormatError("labeled dataset: one label per row required");
    }
    if (ds.num_classes < 1) throw FormatError("labeled dataset: class count must be positive");
    std::vector<long long> counts(static_cast<std::size_t>(ds.num_classes), 0);
    for (int y : ds.labels) {
        if (y < 0 || y >= ds.num_classes) {
            throw FormatError("labeled dataset: label outside {0..C-1}");
        }
        ++counts[static_cast<std::size_t>(y)];
    }
    for (int c = 0; c < ds.num_classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) {
            throw FormatError("labeled dataset: class " + std::to_string(c) + " has no samples");
        }
    }
}

const std::vector<int>& UnlabeledDataset::hidden_labels_for_eval() const {
    if (!hidden_labels_) {
        throw ContractError("UnlabeledDataset: no hidden labels were provided");
    }
    return *hidden_labels_;
}

LabeledDataset generate_blobs(int num_classes, int per_class, int dim, double separation,
                              double spread, std::uint64_t seed) {
    if (num_classes < 2) throw ConfigError("generate_blobs: need at least two classes");
    if (per_class < 1) throw ConfigError("generate_blobs: need at least one sample per class");
    if (dim < 1) throw ConfigError("generate_blobs: dimension must be >= 1");
    if (!(separation > 0.0) || !(spread > 0.0)) {
        throw ConfigError("generate_blobs: separation and spread must be positive");
    }
    if (dim == 1 && num_classes > 2) {
        throw ConfigError("generate_blobs: a 1-D sphere holds at most two distinct centers");
    }

    Rng rng(seed);
    Matrix centers(static_cast<std::size_t>(num_classes), static_cast<std::size_t>(dim));
    if (dim == 1) {
        centers(0, 0) = -separation;
        if (num_classes > 1) centers(1, 0) = separation;
    } else {
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (int c = 0; c < num_classes; ++c) {
            const double angle = phase + 2.0 * std::numbers::pi * c / num_classes;
            centers(static_cast<std::size_t>(c), 0) = separation * std::cos(angle);
            centers(static_cast<std::size_t>(c), 1) = separation * std::sin(angle);
        }
    }

    const std::size_t n = static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(per_class);
    Matrix raw(n, static_cast<std::size_t>(dim));
    std::vector<int> raw_labels(n);
    std::size_t row = 0;
    for (int c = 0; c < num_classes; ++c) {
        for (int s = 0; s < per_class; ++s, ++row) {
            for (int f = 0; f < dim; ++f) {
                raw(row, static_cast<std::size_t>(f)) =
                    centers(static_cast<std::size_t>(c), static_cast<std::size_t>(f)) +
                    spread * rng.normal();
            }
            raw_labels[row] = c;
        }
    }

    const std::vector<std::size_t> order = shuffled_indices(n, rng);
    LabeledDataset ds;
    ds.features = Matrix(n, static_cast<std::size_t>(dim));
    ds.labels.resize(n);
    ds.num_classes = num_classes;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t f = 0; f < static_cast<std::size_t>(dim); ++f) {
            ds.features(r, f) = raw(order[r], f);
        }
        ds.labels[r] = raw_labels[order[r]];
    }
    validate_labeled(ds);
    return ds;
}

LabeledDataset load_labeled_csv(const std::string& path) {
    RawCsv raw = read_csv(path, true);
    LabeledDataset ds;
    ds.features = std::move(raw.features);
    ds.labels = std::move(raw.labels);
    int max_label = 0;
    for (int y : ds.labels) max_label = std::max(max_label, y);
    ds.num_classes = max_label + 1;
    validate_labeled(ds);
    return ds;
}

UnlabeledDataset load_unlabeled_csv(const std::string& path) {
    RawCsv raw = read_csv(path, false);
    return UnlabeledDataset(std::move(raw.features));
}

void save_dataset_csv(const LabeledDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("dataset CSV: cannot open '" + path + "' for writing");
    std::string line;
    for (std::size_t r = 0; r < ds.features.rows; ++r) {
        line.clear();
        for (std::size_t c = 0; c < ds.features.cols; ++c) {
            append_double(line, ds.features(r, c));
            line += ',';
        }
        line += std::to_string(ds.labels[r]);
        line += '\n';
        out << line;
    }
    if (!out) throw FormatError("dataset CSV: write failed for '" + path + "'");
}

void save_features_csv(const Matrix& features, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("dataset CSV: cannot open '" + path + "' for writing");
    std::string line;
    for (std::size_t r = 0; r < features.rows; ++r) {
        line.clear();
        for (std::size_t c = 0; c < features.cols; ++c) {
            if (c > 0) line += ',';
            append_double(line, features(r, c));
        }
        line += '\n';
        out << line;
    }
    if (!out) throw FormatError("dataset CSV: write failed for '" + path + "'");
}

Matrix perturb(const Matrix& features, double scale, std::uint64_t seed) {
    if (scale < 0.0) throw ContractError("perturb: scale must be >= 0");
    Rng rng(seed);
    Matrix out = features;
    for (auto& v : out.data) v += scale * rng.normal();
    return out;
}

std::pair<LabeledDataset, LabeledDataset> split_head(const LabeledDataset& ds, std::size_t n) {
    if (n > ds.size()) throw ContractError("split_head: split point beyond dataset size");
    LabeledDataset head, tail;
    head.num_classes = tail.num_classes = ds.num_classes;
    head.features = Matrix(n, ds.dim());
    tail.features = Matrix(ds.size() - n, ds.dim());
    head.labels.assign(ds.labels.begin(), ds.labels.begin() + static_cast<std::ptrdiff_t>(n));
    tail.labels.assign(ds.labels.begin() + static_cast<std::ptrdiff_t>(n), ds.labels.end());
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < ds.dim(); ++c) head.features(r, c) = ds.features(r, c);
    }
    for (std::size_t r = n; r < ds.size(); ++r) {
        for (std::size_t c = 0; c < ds.dim(); ++c) tail.features(r - n, c) = ds.features(r, c);
    }
    return {std::move(head), std::move(tail)};
}

} // namespace pairlearn
