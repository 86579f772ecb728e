#include "mrst/model/two_layer.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "mrst/core/errors.hpp"
#include "mrst/core/io.hpp"
#include "mrst/core/kernels.hpp"
#include "mrst/core/linalg.hpp"

namespace mrst {

namespace {

void check_codes_shape(const Matrix& r1, const Matrix& z, const char* what) {
    require(z.rows() == r1.rows() && z.cols() == r1.cols(),
            std::string(what) + ": code matrix shape does not match patch matrix");
}

void check_patch_rows(const Matrix& r1, const TwoLayerModel& m) {
    require(r1.rows() == m.dim(), "patch dimension " + std::to_string(r1.rows()) +
                                      " does not match model dimension " + std::to_string(m.dim()));
}

bool has_z2(const TwoLayerModel& m, const Matrix& z2) { return m.layers == 2 && z2.size() != 0; }

double penalty(double t, std::size_t nnz) {
    // nnz == 0 keeps an infinite threshold from producing inf * 0.
    return nnz == 0 ? 0.0 : t * t * static_cast<double>(nnz);
}

Matrix procrustes(const Matrix& g, const Matrix& current) {
    if ((g.array() == 0.0).all()) return current;
    const Svd svd = full_svd(g);
    return svd.V * svd.U.transpose();
}

}  // namespace

void validate_model(const TwoLayerModel& m) {
    require(m.layers == 1 || m.layers == 2, "model layers must be 1 or 2");
    require(m.w1.rows() >= 1 && m.w1.rows() == m.w1.cols(), "W1 must be square and nonempty");
    require(m.w2.rows() == m.w1.rows() && m.w2.cols() == m.w1.cols(), "W2 must match W1 in size");
    require(m.w1.allFinite() && m.w2.allFinite(), "transforms must be finite");
    require(m.eta1 >= 0.0 && m.eta2 >= 0.0, "thresholds must be nonnegative");
    require(orthogonality_error(m.w1) <= kUnitaryTolerance, "W1 is not unitary");
    require(orthogonality_error(m.w2) <= kUnitaryTolerance, "W2 is not unitary");
}

TwoLayerModel initial_model(int patch_w, int patch_h, int layers, double eta1, double eta2) {
    const int p = patch_w * patch_h;
    TwoLayerModel m{dct2_matrix(patch_w, patch_h), Matrix::Identity(p, p), eta1, eta2, layers};
    validate_model(m);
    return m;
}

Matrix layer_residual(const Matrix& r1, const Matrix& z1, const TwoLayerModel& m) {
    check_patch_rows(r1, m);
    check_codes_shape(r1, z1, "layer_residual");
    Matrix r2 = kernels::apply(m.w1, r1);
    r2 -= z1;
    return r2;
}

Matrix sparse_code_layer1(const Matrix& r1, const Matrix& z2, const TwoLayerModel& m, double theta) {
    check_patch_rows(r1, m);
    require(theta >= 0.0, "sparse_code_layer1: threshold must be nonnegative");
    Matrix z1 = kernels::apply(m.w1, r1);
    if (has_z2(m, z2)) {
        check_codes_shape(r1, z2, "sparse_code_layer1");
        z1 -= 0.5 * kernels::apply_transpose(m.w2, z2);
    }
    hard_threshold_inplace(z1, theta / std::sqrt(2.0));
    return z1;
}

Matrix sparse_code_layer2(const Matrix& r1, const Matrix& z1, const TwoLayerModel& m, double theta) {
    require(m.layers == 2, "sparse_code_layer2: model has a single layer");
    require(theta >= 0.0, "sparse_code_layer2: threshold must be nonnegative");
    Matrix z2 = kernels::apply(m.w2, layer_residual(r1, z1, m));
    hard_threshold_inplace(z2, theta);
    return z2;
}

Matrix sparse_code_single(const Matrix& r1, const TwoLayerModel& m, double theta) {
    check_patch_rows(r1, m);
    require(theta >= 0.0, "sparse_code_single: threshold must be nonnegative");
    Matrix z1 = kernels::apply(m.w1, r1);
    hard_threshold_inplace(z1, theta);
    return z1;
}

Matrix update_transform1(const Matrix& r1, const Matrix& z1, const Matrix& z2, const TwoLayerModel& m) {
    check_patch_rows(r1, m);
    check_codes_shape(r1, z1, "update_transform1");
    Matrix g = kernels::cross(r1, z1);
    if (has_z2(m, z2)) {
        check_codes_shape(r1, z2, "update_transform1");
        g += 0.5 * kernels::cross(r1, z2) * m.w2;
    }
    return procrustes(g, m.w1);
}

Matrix update_transform2(const Matrix& r1, const Matrix& z1, const Matrix& z2, const TwoLayerModel& m) {
    require(m.layers == 2, "update_transform2: model has a single layer");
    check_codes_shape(r1, z2, "update_transform2");
    return procrustes(kernels::cross(layer_residual(r1, z1, m), z2), m.w2);
}

ObjectiveTerms objective_terms(const Matrix& r1, const SparseCodes& codes, const TwoLayerModel& m, double t1,
                               double t2) {
    require(t1 >= 0.0 && t2 >= 0.0, "objective: thresholds must be nonnegative");
    ObjectiveTerms out;
    const Matrix r2 = layer_residual(r1, codes.z1, m);
    out.fit1 = kernels::squared_norm(r2);
    out.nnz1 = kernels::count_nonzero(codes.z1);
    out.penalty1 = penalty(t1, out.nnz1);
    if (m.layers == 2) {
        check_codes_shape(r1, codes.z2, "objective");
        Matrix e2 = kernels::apply(m.w2, r2);
        e2 -= codes.z2;
        out.fit2 = kernels::squared_norm(e2);
        out.nnz2 = kernels::count_nonzero(codes.z2);
        out.penalty2 = penalty(t2, out.nnz2);
    }
    return out;
}

double objective_p0(const Matrix& r1, const SparseCodes& codes, const TwoLayerModel& m, double eta1, double eta2) {
    return objective_terms(r1, codes, m, eta1, eta2).total();
}

double objective_regularizer(const Matrix& x, const SparseCodes& codes, const TwoLayerModel& m, double gamma1,
                             double gamma2) {
    return objective_terms(x, codes, m, gamma1, gamma2).total();
}

Image regularizer_gradient(const Image& x, const SparseCodes& codes, const TwoLayerModel& m, double beta,
                           const PatchConfig& cfg) {
    require(cfg.dim() == m.dim(), "patch config does not match model dimension");
    const PatchSet ps = extract_patches(x, cfg);
    Matrix r = layer_residual(ps.data, codes.z1, m);
    if (m.layers == 2) {
        check_codes_shape(ps.data, codes.z2, "regularizer_gradient");
        Matrix e2 = kernels::apply(m.w2, r);
        e2 -= codes.z2;
        r += kernels::apply_transpose(m.w2, e2);
    }
    Image g = aggregate_patches(kernels::apply_transpose(m.w1, r), cfg, x.grid());
    const double scale = 2.0 * beta;
    for (auto& v : g.values()) v *= scale;
    return g;
}

Image regularizer_majorizer(const TwoLayerModel& m, double beta, const PatchConfig& cfg, const Grid& grid) {
    require(cfg.dim() == m.dim(), "patch config does not match model dimension");
    Image d = patch_coverage(cfg, grid);
    const double scale = (m.layers == 2 ? 4.0 : 2.0) * beta;
    for (auto& v : d.values()) v *= scale;
    return d;
}

void write_model(std::ostream& os, const TwoLayerModel& m) {
    validate_model(m);
    io::write_magic(os, "MRSTMDL1");
    io::write_u32(os, static_cast<std::uint32_t>(m.dim()));
    io::write_u8(os, static_cast<std::uint8_t>(m.layers));
    io::write_f64(os, m.eta1);
    io::write_f64(os, m.eta2);
    for (const Matrix* w : {&m.w1, &m.w2})
        for (Eigen::Index i = 0; i < w->rows(); ++i)
            for (Eigen::Index j = 0; j < w->cols(); ++j) io::write_f64(os, (*w)(i, j));
}

TwoLayerModel read_model(std::istream& is) {
    io::expect_magic(is, "MRSTMDL1");
    const auto p = io::read_u32(is);
    if (p == 0 || p > 4096) throw FormatError("MRSTMDL1: bad patch dimension");
    TwoLayerModel m;
    m.layers = io::read_u8(is);
    m.eta1 = io::read_f64(is);
    m.eta2 = io::read_f64(is);
    m.w1.resize(p, p);
    m.w2.resize(p, p);
    for (Matrix* w : {&m.w1, &m.w2})
        for (Eigen::Index i = 0; i < w->rows(); ++i)
            for (Eigen::Index j = 0; j < w->cols(); ++j) (*w)(i, j) = io::read_f64(is);
    try {
        validate_model(m);
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("MRSTMDL1: ") + e.what());
    }
    return m;
}

void save_model(const std::filesystem::path& path, const TwoLayerModel& m) {
    io::write_atomically(path, [&](std::ostream& os) { write_model(os, m); });
}

TwoLayerModel load_model(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    TwoLayerModel m = read_model(is);
    io::expect_eof(is);
    return m;
}

}  // namespace mrst
