#pragma once

#include <string>
#include <utility>

#include <Eigen/Dense>

#include "archipelago/image.hpp"
#include "archipelago/rng.hpp"

namespace archipelago {

/// Network shape: conv (kernel 3, stride 1, valid) -> ReLU -> dense -> ReLU
/// -> LSTM (input is the dense output with the last reward appended) ->
/// linear policy and value heads.
struct NetSpec {
    int conv_channels = 4;
    int mlp_width = 16;
    int lstm_width = 32;
    int num_actions = 6;

    static constexpr int input_size = 15;
    static constexpr int input_channels = 3;
    static constexpr int kernel = 3;

    /// Named profiles: "paper" (16/32/64), "desk" (4/16/32), "tiny" (2/4/8).
    [[nodiscard]] static NetSpec profile(const std::string& name, int num_actions);

    [[nodiscard]] int conv_out_side() const { return input_size - kernel + 1; }
    [[nodiscard]] int conv_spatial() const { return conv_out_side() * conv_out_side(); }
    [[nodiscard]] int conv_flat() const { return conv_spatial() * conv_channels; }
    [[nodiscard]] int patch_len() const { return kernel * kernel * input_channels; }
    [[nodiscard]] int lstm_input() const { return mlp_width + 1; }

    friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

struct LstmState {
    Eigen::VectorXd h;
    Eigen::VectorXd c;
};

/// Everything one forward step caches for backpropagation.
struct StepTape {
    Eigen::MatrixXd patches;    // [spatial x patch_len]
    Eigen::MatrixXd conv_pre;   // [spatial x channels]
    Eigen::MatrixXd conv_post;  // after ReLU
    Eigen::VectorXd z1;         // dense pre-activation
    Eigen::VectorXd a1;         // dense post-ReLU
    Eigen::VectorXd x;          // LSTM input [a1; last_reward]
    Eigen::VectorXd gi, gf, gg, go;  // gate activations
    Eigen::VectorXd h_prev, c_prev;
    Eigen::VectorXd c, tanh_c, h;
    Eigen::VectorXd logits;
    double value = 0.0;
};

class Net {
public:
    explicit Net(const NetSpec& spec);

    [[nodiscard]] const NetSpec& spec() const { return spec_; }
    [[nodiscard]] int num_params() const { return total_; }
    [[nodiscard]] Eigen::VectorXd& params() { return params_; }
    [[nodiscard]] const Eigen::VectorXd& params() const { return params_; }

    /// Orthogonal-style scaled random init for every weight matrix, zero
    /// biases. Gains: sqrt(2) before ReLU, 1 for the LSTM, 0.1 for heads.
    void init_params(CountingRng& rng);

    /// Zeroing both head matrices yields a uniform policy and value 0.
    void zero_head_weights();

    [[nodiscard]] LstmState initial_state() const;

    /// image is the flattened window scaled to [0,1] (see Image::to_doubles).
    [[nodiscard]] StepTape forward_step(const Eigen::VectorXd& image, double last_reward,
                                        const LstmState& state_in) const;

    [[nodiscard]] static LstmState state_of(const StepTape& tape) {
        return LstmState{tape.h, tape.c};
    }

    /// Accumulate parameter gradients for one step given loss gradients at
    /// the heads. dh_carry/dc_carry bring gradient from step t+1 and leave
    /// with the gradient for step t-1; grad must be num_params() long.
    void backward_step(const StepTape& tape, const Eigen::VectorXd& dlogits, double dvalue,
                       Eigen::VectorXd& dh_carry, Eigen::VectorXd& dc_carry,
                       Eigen::VectorXd& grad) const;

    /// Inference without a tape: returns (logits, value), advances the state.
    [[nodiscard]] std::pair<Eigen::VectorXd, double> evaluate(const Eigen::VectorXd& image,
                                                              double last_reward,
                                                              LstmState& state) const;

private:
    struct Layout {
        int Wc, bc, W1, b1, Wx, Wh, bl, Wpi, bpi, Wv, bv, total;
    };
    [[nodiscard]] static Layout make_layout(const NetSpec& spec);

    NetSpec spec_;
    Layout layout_;
    int total_;
    Eigen::VectorXd params_;
};

}  // namespace archipelago
