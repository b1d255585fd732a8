#include "tourank/data.hpp"
#include "tourank/errors.hpp"
#include "tourank/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <string_view>

namespace tourank {

std::vector<int> Dataset::grade_counts() const {
    std::vector<int> counts(static_cast<std::size_t>(num_classes), 0);
    for (const Sample& s : samples) {
        if (s.grade >= 1 && s.grade <= num_classes) counts[static_cast<std::size_t>(s.grade - 1)]++;
    }
    return counts;
}

void validate_dataset(const Dataset& ds) {
    if (ds.num_classes < 2) throw DomainError("dataset needs at least 2 classes, got " + std::to_string(ds.num_classes));
    if (ds.feature_dim < 1) throw DimensionError("feature_dim must be positive, got " + std::to_string(ds.feature_dim));
    if (ds.samples.empty()) throw DomainError("dataset is empty");
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const Sample& s = ds.samples[i];
        if (s.grade < 1 || s.grade > ds.num_classes)
            throw DomainError("sample " + std::to_string(i) + " (" + s.id + "): grade " + std::to_string(s.grade) +
                              " outside [1, " + std::to_string(ds.num_classes) + "]");
        if (static_cast<int>(s.features.size()) != ds.feature_dim)
            throw DimensionError("sample " + std::to_string(i) + " (" + s.id + "): has " +
                                 std::to_string(s.features.size()) + " features, expected " +
                                 std::to_string(ds.feature_dim));
        for (double v : s.features)
            if (!std::isfinite(v))
                throw NumericError("sample " + std::to_string(i) + " (" + s.id + "): non-finite feature value");
    }
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.num_classes = ds.num_classes;
    out.feature_dim = ds.feature_dim;
    out.samples.reserve(indices.size());
    for (std::size_t idx : indices) {
        if (idx >= ds.samples.size()) throw DomainError("subset index " + std::to_string(idx) + " out of range");
        out.samples.push_back(ds.samples[idx]);
    }
    return out;
}

Dataset filter_grades(const Dataset& ds, int lo, int hi) {
    if (lo < 1 || hi > ds.num_classes || lo > hi)
        throw DomainError("grade range [" + std::to_string(lo) + ", " + std::to_string(hi) + "] invalid for " +
                          std::to_string(ds.num_classes) + " classes");
    Dataset out;
    out.num_classes = ds.num_classes;
    out.feature_dim = ds.feature_dim;
    for (const Sample& s : ds.samples)
        if (s.grade >= lo && s.grade <= hi) out.samples.push_back(s);
    return out;
}

std::pair<std::vector<double>, std::vector<double>> standardize_features(Dataset& ds) {
    const std::size_t n = ds.samples.size();
    const std::size_t d = static_cast<std::size_t>(ds.feature_dim);
    if (n == 0) throw DomainError("cannot standardize an empty dataset");
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    for (const Sample& s : ds.samples)
        for (std::size_t j = 0; j < d; ++j) mean[j] += s.features[j];
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
    for (const Sample& s : ds.samples)
        for (std::size_t j = 0; j < d; ++j) {
            const double c = s.features[j] - mean[j];
            sd[j] += c * c;
        }
    for (std::size_t j = 0; j < d; ++j) {
        sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
        if (sd[j] < 1e-12) sd[j] = 1.0; // constant feature: center only
    }
    for (Sample& s : ds.samples)
        for (std::size_t j = 0; j < d; ++j) s.features[j] = (s.features[j] - mean[j]) / sd[j];
    return {std::move(mean), std::move(sd)};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

int parse_int_field(std::string_view tok, std::size_t line_no, const char* what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad " + std::string(what) + " '" + std::string(tok) + "'");
    return v;
}

double parse_double_field(std::string_view tok, std::size_t line_no, const char* what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError("line " + std::to_string(line_no) + ": bad " + std::string(what) + " '" + std::string(tok) + "'");
    return v;
}

} // namespace

Dataset load_csv(const std::string& path, std::optional<int> num_classes_override) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "id" || header[1] != "grade")
        throw ParseError(path + ": header must be id,grade,f0,...");
    const int d = static_cast<int>(header.size()) - 2;
    for (int j = 0; j < d; ++j) {
        std::string expected = "f" + std::to_string(j);
        if (header[static_cast<std::size_t>(j + 2)] != expected)
            throw ParseError(path + ": header column " + std::to_string(j + 2) + " must be '" + expected + "'");
    }

    Dataset ds;
    ds.feature_dim = d;
    int max_grade = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != d + 2)
            throw DimensionError("line " + std::to_string(line_no) + ": expected " + std::to_string(d + 2) +
                                 " fields, got " + std::to_string(fields.size()));
        Sample s;
        s.id = std::string(fields[0]);
        if (s.id.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty id");
        s.grade = parse_int_field(fields[1], line_no, "grade");
        if (s.grade < 1) throw DomainError("line " + std::to_string(line_no) + ": grade must be >= 1, got " + std::to_string(s.grade));
        s.features.reserve(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j) {
            double v = parse_double_field(fields[static_cast<std::size_t>(j + 2)], line_no, "feature");
            if (!std::isfinite(v))
                throw NumericError("line " + std::to_string(line_no) + ": non-finite feature value");
            s.features.push_back(v);
        }
        max_grade = std::max(max_grade, s.grade);
        ds.samples.push_back(std::move(s));
    }
    if (ds.samples.empty()) throw ParseError(path + ": no data rows");

    if (num_classes_override) {
        if (*num_classes_override < 2)
            throw DomainError("num_classes must be >= 2, got " + std::to_string(*num_classes_override));
        if (max_grade > *num_classes_override)
            throw DomainError("observed grade " + std::to_string(max_grade) + " exceeds num_classes " +
                              std::to_string(*num_classes_override));
        ds.num_classes = *num_classes_override;
    } else {
        if (max_grade < 2) throw DomainError(path + ": need grades spanning at least 2 classes");
        ds.num_classes = max_grade;
    }
    validate_dataset(ds);
    return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "id,grade";
    for (int j = 0; j < ds.feature_dim; ++j) out << ",f" << j;
    out << "\n";
    char buf[64];
    for (const Sample& s : ds.samples) {
        out << s.id << ',' << s.grade;
        for (double v : s.features) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------

std::vector<double> latent_positions(int num_classes, double nonlinearity) {
    if (num_classes < 2) throw DomainError("latent_positions needs at least 2 classes");
    if (nonlinearity < 0.0) throw DomainError("nonlinearity must be >= 0");
    const double c = 1.0 / (1.0 + nonlinearity); // pair gap shrinks as nonlinearity grows
    std::vector<double> t(static_cast<std::size_t>(num_classes));
    for (int g = 1; g <= num_classes; ++g) t[static_cast<std::size_t>(g - 1)] = static_cast<double>(g);
    for (int g = 1; g + 1 <= num_classes; g += 2) {
        const double mid = g + 0.5;
        t[static_cast<std::size_t>(g - 1)] = mid - 0.5 * c;
        t[static_cast<std::size_t>(g)] = mid + 0.5 * c;
    }
    return t;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    const int n_classes = static_cast<int>(spec.counts.size());
    if (n_classes < 2) throw DomainError("synthetic data needs counts for at least 2 grades");
    for (int c : spec.counts)
        if (c < 1) throw DomainError("every synthetic grade count must be >= 1");
    if (spec.feature_dim < 1) throw DimensionError("feature_dim must be positive");
    if (!(spec.separation > 0.0)) throw DomainError("separation must be > 0");
    if (spec.nonlinearity < 0.0) throw DomainError("nonlinearity must be >= 0");

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t d = static_cast<std::size_t>(spec.feature_dim);

    // Random latent direction.
    std::vector<double> u(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& v : u) {
            v = gauss(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (double& v : u) v /= norm;

    // Orthogonal bend direction. With nonlinearity > 0 the class means leave
    // the axis and trace an arc, so no single global direction lines up with
    // every adjacent-grade boundary; projections onto u stay strictly
    // monotone. Needs a second dimension; in 1-D the arc degenerates away.
    std::vector<double> v(d, 0.0);
    double arc = 0.0;
    if (d >= 2 && spec.nonlinearity > 0.0) {
        double vnorm = 0.0;
        do {
            double dot = 0.0;
            for (double& x : v) {
                x = gauss(rng);
            }
            for (std::size_t j = 0; j < d; ++j) dot += v[j] * u[j];
            vnorm = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                v[j] -= dot * u[j];
                vnorm += v[j] * v[j];
            }
            vnorm = std::sqrt(vnorm);
        } while (vnorm < 1e-12);
        for (double& x : v) x /= vnorm;
        arc = 0.5 * static_cast<double>(n_classes - 1) * spec.nonlinearity / (1.0 + spec.nonlinearity);
    }

    const std::vector<double> t = latent_positions(n_classes, spec.nonlinearity);
    const double sigma = 1.0 / spec.separation;
    const double t_span = static_cast<double>(n_classes - 1);

    SyntheticData out;
    out.dataset.num_classes = n_classes;
    out.dataset.feature_dim = spec.feature_dim;
    out.latent_means = t;

    std::size_t next_id = 1;
    for (int g = 1; g <= n_classes; ++g) {
        const double tg = t[static_cast<std::size_t>(g - 1)];
        const double hg = arc * std::sin(std::numbers::pi * (tg - 1.0) / t_span);
        for (int i = 0; i < spec.counts[static_cast<std::size_t>(g - 1)]; ++i) {
            Sample s;
            char idbuf[16];
            std::snprintf(idbuf, sizeof(idbuf), "s%06zu", next_id++);
            s.id = idbuf;
            s.grade = g;
            s.features.resize(d);
            for (std::size_t j = 0; j < d; ++j) s.features[j] = tg * u[j] + hg * v[j] + sigma * gauss(rng);
            out.dataset.samples.push_back(std::move(s));
        }
    }

    auto [mean, sd] = standardize_features(out.dataset);
    (void)mean;
    // Projecting standardized features onto sd_j*u_j undoes the scaling and
    // recovers t exactly (the bend is orthogonal to u), so per-grade projected
    // means stay strictly increasing.
    out.latent_axis.resize(d);
    double axis_norm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        out.latent_axis[j] = sd[j] * u[j];
        axis_norm += out.latent_axis[j] * out.latent_axis[j];
    }
    axis_norm = std::sqrt(axis_norm);
    for (double& x : out.latent_axis) x /= axis_norm;

    validate_dataset(out.dataset);
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<int, int>> FoldSplit::missing_grade_folds() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t g = 0; g < grade_fold_counts.size(); ++g)
        for (int f = 0; f < fold_count; ++f)
            if (grade_fold_counts[g][static_cast<std::size_t>(f)] == 0)
                out.emplace_back(static_cast<int>(g) + 1, f);
    return out;
}

FoldSplit stratified_kfold(const Dataset& ds, int k, std::uint64_t seed) {
    validate_dataset(ds);
    if (k < 2) throw DomainError("fold count must be >= 2, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) > ds.samples.size())
        throw DomainError("fold count " + std::to_string(k) + " exceeds sample count " +
                          std::to_string(ds.samples.size()));

    std::vector<std::vector<std::size_t>> by_grade(static_cast<std::size_t>(ds.num_classes));
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        by_grade[static_cast<std::size_t>(ds.samples[i].grade - 1)].push_back(i);

    FoldSplit split;
    split.fold_count = k;
    split.assignments.assign(ds.samples.size(), -1);
    split.grade_fold_counts.assign(static_cast<std::size_t>(ds.num_classes),
                                   std::vector<int>(static_cast<std::size_t>(k), 0));

    std::mt19937_64 rng(seed);
    // The deal cursor carries over between grades so total fold sizes stay
    // within one of each other, not just the per-grade counts.
    std::size_t cursor = 0;
    for (std::size_t g = 0; g < by_grade.size(); ++g) {
        auto& idx = by_grade[g];
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const int fold = static_cast<int>((cursor + j) % static_cast<std::size_t>(k));
            split.assignments[idx[j]] = fold;
            split.grade_fold_counts[g][static_cast<std::size_t>(fold)]++;
        }
        cursor = (cursor + idx.size()) % static_cast<std::size_t>(k);
    }
    return split;
}

} // namespace tourank
