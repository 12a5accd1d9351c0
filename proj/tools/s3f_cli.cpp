// Copyright 2026 The S3F Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// s3f: fit, generate, evaluate, bench and sensitivity from the command line.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "s3f/pipeline.hpp"

namespace {

struct Flags {
  std::string config, data, method, solver, out, fake, bank;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_samples;
  std::optional<double> init_mu, init_sigma;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run config");
  cmd->add_option("--data", f.data, "input CSV");
  cmd->add_option("--method", f.method, "FF, CS3F or HS3F");
  cmd->add_option("--solver", f.solver, "euler or rk4");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--n-samples", f.n_samples, "rows to generate (default: training rows)");
  cmd->add_option("--init-mu", f.init_mu, "initial noise mean");
  cmd->add_option("--init-sigma", f.init_sigma, "initial noise standard deviation");
}

s3f::RunConfig resolve(const Flags& f) {
  s3f::RunConfig c = f.config.empty() ? s3f::RunConfig{} : s3f::load_config(f.config);
  if (!f.data.empty()) c.data = f.data;
  if (!f.method.empty()) c.method = s3f::parse_method(f.method);
  if (!f.solver.empty()) c.solver = s3f::parse_solver(f.solver);
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.out = f.out;
  if (f.n_samples) c.n_samples = *f.n_samples;
  if (f.init_mu) c.init_mu = *f.init_mu;
  if (f.init_sigma) c.init_sigma = *f.init_sigma;
  return c;
}

int fail(std::string_view kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential flow matching with boosted trees for tabular data"};
  app.require_subcommand(1);
  Flags f;
  auto* fit = app.add_subcommand("fit", "train a velocity model bank");
  auto* gen = app.add_subcommand("generate", "sample from a saved bank");
  auto* eval = app.add_subcommand("evaluate", "score a generated CSV");
  auto* bench = app.add_subcommand("bench", "compare methods on one split");
  auto* sens = app.add_subcommand("sensitivity", "initial-noise sensitivity table");
  for (auto* cmd : {fit, gen, eval, bench, sens}) add_common(cmd, f);
  gen->add_option("--bank", f.bank, "bank directory (default: <out>/bank)");
  eval->add_option("--fake", f.fake, "generated CSV (default: <out>/fake.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("ArgumentError", e.what(), 2);
  }

  try {
    s3f::RunConfig c = resolve(f);
    if (fit->parsed()) {
      s3f::cmd_fit(c, std::cout);
    } else if (gen->parsed()) {
      const std::string bank = f.bank.empty() ? (std::filesystem::path(c.out) / "bank").string() : f.bank;
      std::optional<s3f::Method> method;
      if (!f.method.empty()) method = c.method;
      s3f::cmd_generate(c, bank, method, std::cout);
    } else if (eval->parsed()) {
      const std::string fake = f.fake.empty() ? (std::filesystem::path(c.out) / "fake.csv").string() : f.fake;
      s3f::cmd_evaluate(c, fake, std::cout);
    } else if (bench->parsed()) {
      s3f::cmd_bench(c, std::cout);
    } else if (sens->parsed()) {
      s3f::cmd_sensitivity(c, std::cout);
    }
  } catch (const s3f::Error& e) {
    return fail(s3f::error_name(e.kind()), e.what(), s3f::exit_code_for(e.kind()));
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("IngestError", e.what(), 3);
  }
  return 0;
}
