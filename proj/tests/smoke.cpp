#include "lacnn/lacnn.hpp"
#include <iostream>

int main() {
    using namespace lacnn;
    LandmarkSet lm{{{1.0, 1.0}, {6.0, 6.0}}, "img"};
    auto ch = augment_fll(lm, 8, 8);
    std::cout << "voronoi " << ch.at(0, 0) << ch.at(7, 7) << "\n";
    auto cfg = nn::mini_net_config(32, 4, 2, 7);
    auto params = nn::init_parameters<float>(cfg);
    nn::Tensor<float> batch({2, 32, 32, 4});
    auto logits = nn::forward(cfg, params, batch, nn::RunMode::kEval);
    std::cout << "logits " << logits.at2(0, 0) << " " << logits.at2(1, 1) << "\n";
    return 0;
}
