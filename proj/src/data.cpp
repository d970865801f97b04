#include "hdcos/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "hdcos/errors.hpp"

namespace hdcos {

namespace {

// gzread handles both gzip and plain content, so extension sniffing only
// matters for error messages.
std::vector<std::uint8_t> read_file_maybe_gz(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw FormatError("cannot open " + path);
    std::vector<std::uint8_t> out;
    std::uint8_t buf[1 << 16];
    int n = 0;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.insert(out.end(), buf, buf + n);
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw FormatError("decompression failed for " + path);
    return out;
}

std::uint32_t be32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 | std::uint32_t(p[2]) << 8 |
           std::uint32_t(p[3]);
}

}  // namespace

Dataset load_mnist_idx(const std::string& images_path, const std::string& labels_path,
                       const std::string& name) {
    const auto img = read_file_maybe_gz(images_path);
    if (img.size() < 16) throw FormatError("idx images: truncated header in " + images_path);
    if (be32(img.data()) != 0x00000803u)
        throw FormatError("idx images: bad magic in " + images_path);
    const std::uint32_t n = be32(img.data() + 4);
    const std::uint32_t rows = be32(img.data() + 8);
    const std::uint32_t cols = be32(img.data() + 12);
    const std::size_t want = 16 + std::size_t(n) * rows * cols;
    if (img.size() != want) throw FormatError("idx images: truncated payload in " + images_path);

    const auto lab = read_file_maybe_gz(labels_path);
    if (lab.size() < 8) throw FormatError("idx labels: truncated header in " + labels_path);
    if (be32(lab.data()) != 0x00000801u)
        throw FormatError("idx labels: bad magic in " + labels_path);
    const std::uint32_t nl = be32(lab.data() + 4);
    if (nl != n) throw FormatError("idx: image/label count mismatch");
    if (lab.size() != 8 + std::size_t(nl)) throw FormatError("idx labels: truncated payload");

    Dataset ds;
    ds.name = name;
    ds.classes = 10;
    const std::size_t d = std::size_t(rows) * cols;
    ds.features = Mat(n, d);
    ds.labels.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint8_t* px = img.data() + 16 + std::size_t(i) * d;
        for (std::size_t j = 0; j < d; ++j) ds.features(long(i), long(j)) = px[j] / 255.0;
        const std::uint8_t l = lab[8 + i];
        if (l > 9) throw FormatError("idx labels: label out of range");
        ds.labels[i] = l;
    }
    return ds;
}

Dataset synth_gaussians(int n, int d, int classes, double separation, std::uint64_t seed) {
    if (n < 1 || d < 1 || classes < 1)
        throw std::invalid_argument("synth_gaussians: n, d, classes must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    // Means sep/sqrt(2) along distinct axes are pairwise `separation` apart.
    Mat means = Mat::Zero(classes, d);
    for (int c = 0; c < classes; ++c) means(c, c % d) = separation / std::sqrt(2.0);

    Dataset ds;
    ds.name = "synth_gaussians";
    ds.classes = classes;
    ds.features = Mat(n, d);
    ds.labels.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        const int c = i % classes;
        ds.labels[std::size_t(i)] = c;
        for (int j = 0; j < d; ++j) ds.features(i, j) = means(c, j) + noise(rng);
    }
    return ds;
}

namespace {

Dataset take_rows(const Dataset& ds, std::span<const long> idx, const std::string& tag) {
    Dataset out;
    out.name = ds.name;
    out.classes = ds.classes;
    out.split_tag = tag;
    out.features = Mat(long(idx.size()), ds.features.cols());
    out.labels.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.features.row(long(i)) = ds.features.row(idx[i]);
        out.labels[i] = ds.labels[std::size_t(idx[i])];
    }
    return out;
}

std::vector<long> shuffled_indices(long n, std::uint64_t seed) {
    std::vector<long> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0L);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

}  // namespace

Dataset subsample(const Dataset& ds, int n, std::uint64_t seed) {
    if (long(n) > ds.n()) throw std::invalid_argument("subsample: n exceeds dataset size");
    const auto idx = shuffled_indices(ds.n(), seed);
    return take_rows(ds, std::span<const long>(idx.data(), std::size_t(n)), "subsample");
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double fraction,
                                          std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split: fraction must be in (0, 1)");
    const auto idx = shuffled_indices(ds.n(), seed);
    const std::size_t n_first = std::size_t(std::floor(fraction * double(ds.n())));
    return {take_rows(ds, std::span<const long>(idx.data(), n_first), "split_a"),
            take_rows(ds, std::span<const long>(idx.data() + n_first, idx.size() - n_first),
                      "split_b")};
}

}  // namespace hdcos
