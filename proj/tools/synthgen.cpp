// synthgen: writes a synthetic credit-scoring-style CSV for demos and
// experiments when no real dataset is at hand.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "smudge/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"generate a synthetic credit-risk-style CSV"};
    std::string out;
    smudge::SyntheticCreditOptions opts;
    bool no_missing = false;
    app.add_option("out", out, "output CSV path")->required();
    app.add_option("--rows", opts.rows, "row count (default 8000)");
    app.add_option("--seed", opts.seed, "generator seed (default 7)");
    app.add_option("--noise", opts.noise_scale, "label noise scale (default 0.8)");
    app.add_flag("--no-missing", no_missing, "emit fully observed rows");
    CLI11_PARSE(app, argc, argv);

    opts.with_missing = !no_missing;
    try {
        const smudge::Dataset ds = smudge::make_credit_dataset(opts);
        smudge::write_csv(ds, out);
        std::cout << "wrote " << out << " (" << ds.n_rows() << " rows, " << ds.n_cols()
                  << " columns)\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
