#include "fraudward/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "fraudward/errors.hpp"

namespace fraudward {

namespace {

constexpr char kMagic[4] = {'F', 'R', 'W', 'D'};
constexpr uint32_t kFormatVersion = 1;

class Writer {
public:
    void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        buf_.append(s);
    }
    const std::string& data() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    uint8_t u8() { return static_cast<uint8_t>(take(1)[0]); }
    uint32_t u32() {
        const char* p = take(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(p[i])) << (8 * i);
        return v;
    }
    uint64_t u64() {
        const char* p = take(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(p[i])) << (8 * i);
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    int64_t i64() { return static_cast<int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const uint32_t len = u32();
        const char* p = take(len);
        return std::string(p, len);
    }
    bool exhausted() const { return pos_ == data_.size(); }

private:
    const char* take(size_t n) {
        if (pos_ + n > data_.size()) raise(ErrorCode::CorruptModel, "model file is truncated");
        const char* p = data_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::string data_;
    size_t pos_ = 0;
};

void write_tree(Writer& w, const Tree& tree) {
    w.u32(static_cast<uint32_t>(tree.nodes.size()));
    w.i32(tree.depth);
    for (const TreeNode& nd : tree.nodes) {
        w.i32(nd.feature);
        w.f64(nd.threshold);
        w.i32(nd.left);
        w.i32(nd.right);
        w.f64(nd.value);
    }
}

Tree read_tree(Reader& r) {
    Tree tree;
    const uint32_t n = r.u32();
    tree.depth = r.i32();
    tree.nodes.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        TreeNode nd;
        nd.feature = r.i32();
        nd.threshold = r.f64();
        nd.left = r.i32();
        nd.right = r.i32();
        nd.value = r.f64();
        if (!nd.is_leaf()) {
            if (nd.left < 0 || nd.right < 0 || static_cast<uint32_t>(nd.left) >= n ||
                static_cast<uint32_t>(nd.right) >= n) {
                raise(ErrorCode::CorruptModel, "tree node has out-of-range children");
            }
        }
        tree.nodes.push_back(nd);
    }
    if (tree.nodes.empty()) raise(ErrorCode::CorruptModel, "tree has no nodes");
    return tree;
}

void write_pipeline(Writer& w, const FittedPipeline& p) {
    w.u8(static_cast<uint8_t>(p.variant));
    w.u32(static_cast<uint32_t>(p.one_hot.features.size()));
    for (const auto& f : p.one_hot.features) {
        w.str(f.name);
        w.u8(f.kind == FeatureKind::numeric ? 0 : 1);
        w.u32(static_cast<uint32_t>(f.categories.size()));
        for (const auto& c : f.categories) w.str(c);
        w.i64(f.offset);
        w.i64(f.width);
    }
    w.i64(p.one_hot.width);
    w.u32(static_cast<uint32_t>(p.tanh_mask.size()));
    for (uint8_t b : p.tanh_mask) w.u8(b);
    w.u8(p.pca ? 1 : 0);
    if (p.pca) {
        const PcaModel& pca = *p.pca;
        w.i64(pca.input_width());
        for (double v : pca.mean) w.f64(v);
        w.i64(pca.n_components());
        for (double v : pca.components.values) w.f64(v);
        for (double v : pca.explained_variance) w.f64(v);
        w.f64(pca.total_variance);
    }
}

FittedPipeline read_pipeline(Reader& r) {
    FittedPipeline p;
    p.variant = static_cast<PipelineVariant>(r.u8());
    const uint32_t n_features = r.u32();
    for (uint32_t i = 0; i < n_features; ++i) {
        OneHotMap::FeatureColumns f;
        f.name = r.str();
        f.kind = r.u8() == 0 ? FeatureKind::numeric : FeatureKind::categorical;
        const uint32_t n_cats = r.u32();
        for (uint32_t c = 0; c < n_cats; ++c) f.categories.push_back(r.str());
        f.offset = r.i64();
        f.width = r.i64();
        p.one_hot.features.push_back(std::move(f));
    }
    p.one_hot.width = r.i64();
    const uint32_t mask_len = r.u32();
    p.tanh_mask.resize(mask_len);
    for (uint32_t i = 0; i < mask_len; ++i) p.tanh_mask[i] = r.u8();
    if (r.u8() == 1) {
        PcaModel pca;
        const int64_t width = r.i64();
        if (width < 0 || width > (1 << 24)) raise(ErrorCode::CorruptModel, "unreasonable PCA width");
        pca.mean.resize(static_cast<size_t>(width));
        for (double& v : pca.mean) v = r.f64();
        const int64_t k = r.i64();
        if (k < 0 || k > width) raise(ErrorCode::CorruptModel, "unreasonable PCA component count");
        pca.components = Matrix(k, width);
        for (double& v : pca.components.values) v = r.f64();
        pca.explained_variance.resize(static_cast<size_t>(k));
        for (double& v : pca.explained_variance) v = r.f64();
        pca.total_variance = r.f64();
        p.pca = std::move(pca);
    }
    return p;
}

}  // namespace

void save_model(const ModelBundle& bundle, const std::string& path) {
    Writer w;
    w.u32(kFormatVersion);
    w.u8(model_kind(bundle.model) == ModelKind::rf ? 0 : 1);
    write_pipeline(w, bundle.pipeline);
    if (const auto* rf = std::get_if<ForestModel>(&bundle.model)) {
        w.i32(rf->params.n_trees);
        w.i32(rf->params.max_depth);
        w.u8(rf->params.bootstrap ? 1 : 0);
        w.u8(rf->params.feature_rule == FeatureRule::sqrt_count ? 1 : 0);
        w.u64(rf->params.seed);
        w.u8(rf->single_class ? 1 : 0);
        w.i64(rf->width);
        w.u32(static_cast<uint32_t>(rf->trees.size()));
        for (const Tree& t : rf->trees) write_tree(w, t);
    } else {
        const auto& gb = std::get<GbdtModel>(bundle.model);
        w.i32(gb.params.n_trees);
        w.i32(gb.params.max_depth);
        w.f64(gb.params.learning_rate);
        w.u64(gb.params.seed);
        w.f64(gb.f0);
        w.i64(gb.width);
        w.u32(static_cast<uint32_t>(gb.stages.size()));
        for (const Tree& t : gb.stages) write_tree(w, t);
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::IoFailure, "cannot write model file '" + path + "'");
    out.write(kMagic, sizeof(kMagic));
    out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
    if (!out) raise(ErrorCode::IoFailure, "failed writing model file '" + path + "'");
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::IoFailure, "cannot open model file '" + path + "'");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (data.size() < sizeof(kMagic) || std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
        raise(ErrorCode::CorruptModel, "'" + path + "' is not a FRWD model file");
    }
    Reader r(data.substr(sizeof(kMagic)));
    const uint32_t version = r.u32();
    if (version != kFormatVersion) {
        raise(ErrorCode::VersionMismatch,
              "model format_version " + std::to_string(version) + " is not supported (expected " +
                  std::to_string(kFormatVersion) + ")");
    }
    const uint8_t kind = r.u8();
    if (kind > 1) raise(ErrorCode::CorruptModel, "unknown model kind tag");

    ModelBundle bundle;
    bundle.pipeline = read_pipeline(r);
    if (kind == 0) {
        ForestModel rf;
        rf.params.n_trees = r.i32();
        rf.params.max_depth = r.i32();
        rf.params.bootstrap = r.u8() == 1;
        rf.params.feature_rule = r.u8() == 1 ? FeatureRule::sqrt_count : FeatureRule::all;
        rf.params.seed = r.u64();
        rf.single_class = r.u8() == 1;
        rf.width = r.i64();
        const uint32_t n_trees = r.u32();
        for (uint32_t t = 0; t < n_trees; ++t) rf.trees.push_back(read_tree(r));
        bundle.model = std::move(rf);
    } else {
        GbdtModel gb;
        gb.params.n_trees = r.i32();
        gb.params.max_depth = r.i32();
        gb.params.learning_rate = r.f64();
        gb.params.seed = r.u64();
        gb.f0 = r.f64();
        gb.width = r.i64();
        const uint32_t n_stages = r.u32();
        for (uint32_t t = 0; t < n_stages; ++t) gb.stages.push_back(read_tree(r));
        bundle.model = std::move(gb);
    }
    if (!r.exhausted()) raise(ErrorCode::CorruptModel, "trailing bytes after the model payload");
    return bundle;
}

}  // namespace fraudward
