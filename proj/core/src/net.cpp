#include "archipelago/net.hpp"

#include <cmath>

#include "archipelago/errors.hpp"

namespace archipelago {

namespace {

using MatMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

ConstMatMap cmat(const Eigen::VectorXd& v, int off, int rows, int cols) {
    return ConstMatMap(v.data() + off, rows, cols);
}
MatMap mat(Eigen::VectorXd& v, int off, int rows, int cols) {
    return MatMap(v.data() + off, rows, cols);
}
ConstVecMap cvec(const Eigen::VectorXd& v, int off, int len) {
    return ConstVecMap(v.data() + off, len);
}
VecMap vec(Eigen::VectorXd& v, int off, int len) {
    return VecMap(v.data() + off, len);
}

double gaussian(CountingRng& rng) {
    // Box-Muller, one value per pair of uniforms; keeps the draw stream
    // implementation-independent.
    double u1 = uniform_double(rng);
    while (u1 <= 0.0) u1 = uniform_double(rng);
    const double u2 = uniform_double(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

void orthogonal_init(MatMap w, CountingRng& rng, double gain) {
    const int n = static_cast<int>(std::max(w.rows(), w.cols()));
    Eigen::MatrixXd a(n, n);
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) a(r, c) = gaussian(rng);
    }
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
    w = gain * q.topLeftCorner(w.rows(), w.cols());
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& v) {
    return v.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

}  // namespace

NetSpec NetSpec::profile(const std::string& name, int num_actions) {
    NetSpec spec;
    spec.num_actions = num_actions;
    if (name == "paper") {
        spec.conv_channels = 16;
        spec.mlp_width = 32;
        spec.lstm_width = 64;
    } else if (name == "desk") {
        spec.conv_channels = 4;
        spec.mlp_width = 16;
        spec.lstm_width = 32;
    } else if (name == "tiny") {
        spec.conv_channels = 2;
        spec.mlp_width = 4;
        spec.lstm_width = 8;
    } else {
        throw ConfigError("NetSpec::profile: unknown profile '" + name + "'");
    }
    return spec;
}

Net::Layout Net::make_layout(const NetSpec& spec) {
    Layout l{};
    int off = 0;
    const auto take = [&off](int count) {
        const int at = off;
        off += count;
        return at;
    };
    l.Wc = take(spec.conv_channels * spec.patch_len());
    l.bc = take(spec.conv_channels);
    l.W1 = take(spec.mlp_width * spec.conv_flat());
    l.b1 = take(spec.mlp_width);
    l.Wx = take(4 * spec.lstm_width * spec.lstm_input());
    l.Wh = take(4 * spec.lstm_width * spec.lstm_width);
    l.bl = take(4 * spec.lstm_width);
    l.Wpi = take(spec.num_actions * spec.lstm_width);
    l.bpi = take(spec.num_actions);
    l.Wv = take(spec.lstm_width);
    l.bv = take(1);
    l.total = off;
    return l;
}

Net::Net(const NetSpec& spec) : spec_(spec), layout_(make_layout(spec)), total_(layout_.total) {
    if (spec.conv_channels <= 0 || spec.mlp_width <= 0 || spec.lstm_width <= 0 ||
        spec.num_actions <= 0) {
        throw ArgumentError("Net: all widths must be positive");
    }
    params_ = Eigen::VectorXd::Zero(total_);
}

void Net::init_params(CountingRng& rng) {
    params_.setZero();
    const double relu_gain = std::sqrt(2.0);
    orthogonal_init(mat(params_, layout_.Wc, spec_.conv_channels, spec_.patch_len()), rng,
                    relu_gain);
    orthogonal_init(mat(params_, layout_.W1, spec_.mlp_width, spec_.conv_flat()), rng, relu_gain);
    orthogonal_init(mat(params_, layout_.Wx, 4 * spec_.lstm_width, spec_.lstm_input()), rng, 1.0);
    orthogonal_init(mat(params_, layout_.Wh, 4 * spec_.lstm_width, spec_.lstm_width), rng, 1.0);
    orthogonal_init(mat(params_, layout_.Wpi, spec_.num_actions, spec_.lstm_width), rng, 0.1);
    orthogonal_init(mat(params_, layout_.Wv, 1, spec_.lstm_width), rng, 0.1);
}

void Net::zero_head_weights() {
    vec(params_, layout_.Wpi, spec_.num_actions * spec_.lstm_width).setZero();
    vec(params_, layout_.bpi, spec_.num_actions).setZero();
    vec(params_, layout_.Wv, spec_.lstm_width).setZero();
    vec(params_, layout_.bv, 1).setZero();
}

LstmState Net::initial_state() const {
    return LstmState{Eigen::VectorXd::Zero(spec_.lstm_width),
                     Eigen::VectorXd::Zero(spec_.lstm_width)};
}

StepTape Net::forward_step(const Eigen::VectorXd& image, double last_reward,
                           const LstmState& state_in) const {
    const int side = NetSpec::input_size;
    const int ch = NetSpec::input_channels;
    if (image.size() != side * side * ch) {
        throw ArgumentError("Net::forward_step: observation has wrong size");
    }
    if (state_in.h.size() != spec_.lstm_width || state_in.c.size() != spec_.lstm_width) {
        throw ArgumentError("Net::forward_step: recurrent state has wrong width");
    }
    StepTape t;
    const int out_side = spec_.conv_out_side();
    const int spatial = spec_.conv_spatial();
    const int plen = spec_.patch_len();

    t.patches.resize(spatial, plen);
    for (int r = 0; r < out_side; ++r) {
        for (int c = 0; c < out_side; ++c) {
            const int s = r * out_side + c;
            int k = 0;
            for (int dr = 0; dr < NetSpec::kernel; ++dr) {
                for (int dc = 0; dc < NetSpec::kernel; ++dc) {
                    const int base = ((r + dr) * side + (c + dc)) * ch;
                    for (int cc = 0; cc < ch; ++cc) {
                        t.patches(s, k++) = image[base + cc];
                    }
                }
            }
        }
    }

    const auto Wc = cmat(params_, layout_.Wc, spec_.conv_channels, plen);
    const auto bc = cvec(params_, layout_.bc, spec_.conv_channels);
    t.conv_pre = t.patches * Wc.transpose();
    t.conv_pre.rowwise() += bc.transpose();
    t.conv_post = t.conv_pre.cwiseMax(0.0);

    const auto W1 = cmat(params_, layout_.W1, spec_.mlp_width, spec_.conv_flat());
    const auto b1 = cvec(params_, layout_.b1, spec_.mlp_width);
    const ConstVecMap conv_flat(t.conv_post.data(), spec_.conv_flat());
    t.z1 = W1 * conv_flat + b1;
    t.a1 = t.z1.cwiseMax(0.0);

    t.x.resize(spec_.lstm_input());
    t.x.head(spec_.mlp_width) = t.a1;
    t.x[spec_.mlp_width] = last_reward;

    const int H = spec_.lstm_width;
    const auto Wx = cmat(params_, layout_.Wx, 4 * H, spec_.lstm_input());
    const auto Wh = cmat(params_, layout_.Wh, 4 * H, H);
    const auto bl = cvec(params_, layout_.bl, 4 * H);
    t.h_prev = state_in.h;
    t.c_prev = state_in.c;
    const Eigen::VectorXd gates = Wx * t.x + Wh * t.h_prev + bl;
    t.gi = sigmoid(gates.segment(0, H));
    t.gf = sigmoid(gates.segment(H, H));
    t.gg = gates.segment(2 * H, H).array().tanh();
    t.go = sigmoid(gates.segment(3 * H, H));
    t.c = t.gf.cwiseProduct(t.c_prev) + t.gi.cwiseProduct(t.gg);
    t.tanh_c = t.c.array().tanh();
    t.h = t.go.cwiseProduct(t.tanh_c);

    const auto Wpi = cmat(params_, layout_.Wpi, spec_.num_actions, H);
    const auto bpi = cvec(params_, layout_.bpi, spec_.num_actions);
    const auto Wv = cmat(params_, layout_.Wv, 1, H);
    t.logits = Wpi * t.h + bpi;
    t.value = (Wv * t.h)(0) + params_[layout_.bv];
    return t;
}

void Net::backward_step(const StepTape& t, const Eigen::VectorXd& dlogits, double dvalue,
                        Eigen::VectorXd& dh_carry, Eigen::VectorXd& dc_carry,
                        Eigen::VectorXd& grad) const {
    const int H = spec_.lstm_width;
    if (dlogits.size() != spec_.num_actions) {
        throw ArgumentError("Net::backward_step: dlogits has wrong size");
    }
    if (grad.size() != total_) {
        throw ArgumentError("Net::backward_step: gradient buffer has wrong size");
    }

    const auto Wpi = cmat(params_, layout_.Wpi, spec_.num_actions, H);
    const auto Wv = cmat(params_, layout_.Wv, 1, H);
    mat(grad, layout_.Wpi, spec_.num_actions, H) += dlogits * t.h.transpose();
    vec(grad, layout_.bpi, spec_.num_actions) += dlogits;
    mat(grad, layout_.Wv, 1, H) += dvalue * t.h.transpose();
    grad[layout_.bv] += dvalue;

    Eigen::VectorXd dh = Wpi.transpose() * dlogits + dvalue * Wv.transpose() + dh_carry;

    const Eigen::VectorXd dgo = dh.cwiseProduct(t.tanh_c);
    Eigen::VectorXd dc =
        dc_carry + dh.cwiseProduct(t.go).cwiseProduct(
                       (1.0 - t.tanh_c.array().square()).matrix());
    const Eigen::VectorXd dgi = dc.cwiseProduct(t.gg);
    const Eigen::VectorXd dgg = dc.cwiseProduct(t.gi);
    const Eigen::VectorXd dgf = dc.cwiseProduct(t.c_prev);
    dc_carry = dc.cwiseProduct(t.gf);

    Eigen::VectorXd dgates(4 * H);
    dgates.segment(0, H) =
        dgi.cwiseProduct(t.gi).cwiseProduct((1.0 - t.gi.array()).matrix());
    dgates.segment(H, H) =
        dgf.cwiseProduct(t.gf).cwiseProduct((1.0 - t.gf.array()).matrix());
    dgates.segment(2 * H, H) = dgg.cwiseProduct((1.0 - t.gg.array().square()).matrix());
    dgates.segment(3 * H, H) =
        dgo.cwiseProduct(t.go).cwiseProduct((1.0 - t.go.array()).matrix());

    const auto Wx = cmat(params_, layout_.Wx, 4 * H, spec_.lstm_input());
    const auto Wh = cmat(params_, layout_.Wh, 4 * H, H);
    mat(grad, layout_.Wx, 4 * H, spec_.lstm_input()) += dgates * t.x.transpose();
    mat(grad, layout_.Wh, 4 * H, H) += dgates * t.h_prev.transpose();
    vec(grad, layout_.bl, 4 * H) += dgates;
    const Eigen::VectorXd dx = Wx.transpose() * dgates;
    dh_carry = Wh.transpose() * dgates;

    const Eigen::VectorXd da1 = dx.head(spec_.mlp_width);
    const Eigen::VectorXd dz1 =
        da1.cwiseProduct((t.z1.array() > 0.0).cast<double>().matrix());
    const auto W1 = cmat(params_, layout_.W1, spec_.mlp_width, spec_.conv_flat());
    const ConstVecMap conv_flat(t.conv_post.data(), spec_.conv_flat());
    mat(grad, layout_.W1, spec_.mlp_width, spec_.conv_flat()) += dz1 * conv_flat.transpose();
    vec(grad, layout_.b1, spec_.mlp_width) += dz1;
    const Eigen::VectorXd dconv_flat = W1.transpose() * dz1;

    const ConstMatMap dconv_mat(dconv_flat.data(), spec_.conv_spatial(), spec_.conv_channels);
    const Eigen::MatrixXd dconv_pre =
        dconv_mat.cwiseProduct((t.conv_pre.array() > 0.0).cast<double>().matrix());
    mat(grad, layout_.Wc, spec_.conv_channels, spec_.patch_len()) +=
        dconv_pre.transpose() * t.patches;
    vec(grad, layout_.bc, spec_.conv_channels) += dconv_pre.colwise().sum();
}

std::pair<Eigen::VectorXd, double> Net::evaluate(const Eigen::VectorXd& image, double last_reward,
                                                 LstmState& state) const {
    StepTape t = forward_step(image, last_reward, state);
    state = state_of(t);
    return {std::move(t.logits), t.value};
}

}  // namespace archipelago
