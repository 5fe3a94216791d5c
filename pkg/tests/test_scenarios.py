"""Scenario configs: strict parsing, canonical round-trips, exact tables."""

import math

import numpy as np
import pytest

from delnet.prob import ConfigError
from delnet.scenarios import (
    ALL_KINDS,
    RUN_KINDS,
    ResultTable,
    parse_config,
    pearson,
    run_config,
    serialize_config,
)

RELAY = """
[scenario]
kind = "relay-depth"
seed = 0

[model]
labels = 4

[relay]
depths = [1, 2, 3, 5]

[relay.hop]
fidelity = 0.9
"""

INTERFACE = """
[scenario]
kind = "interface"
seed = 0

[model]
labels = 6
prior = [0.3, 0.3, 0.2, 0.1, 0.06, 0.04]

[interface]
stages = 3
budget = 4

[interface.prose]
fidelity = 0.85
"""

SCATTER = """
[scenario]
kind = "distortion-scatter"
seed = 7

[scatter]
instances = 8
label_count = 3
signal_count = 4
hops = 2

[scatter.relay]
fidelity = 0.9
"""

EXPANSION = """
[scenario]
kind = "signal-expansion"
seed = 0

[model]
labels = 2

[expansion.message]
rows = [[1.0], [1.0]]

[[expansion.settings]]
name = "redundant-copy"
inputs = "m"
rows = [[1.0]]

[[expansion.settings]]
name = "fresh-look"
inputs = "ym"
fidelity = 0.8
"""

REVIEW = """
[scenario]
kind = "review-frontier"
seed = 0

[model]
labels = 2

[model.base]
fidelity = 0.8

[review]
costs = [0.0, 0.05, 0.1, 0.2, 1.0]
"""

NETWORK = """
[scenario]
kind = "custom-network"
seed = 0

[model]
labels = 2

[network]
edges = [["relay", "decide"]]

[[network.variables]]
name = "b"
parents = ["y"]
rows = [[0.9, 0.1], [0.2, 0.8]]

[[network.nodes]]
id = "relay"
inputs = ["b"]
rows = [[0.8, 0.2], [0.2, 0.8]]

[[network.nodes]]
id = "decide"
inputs = ["relay"]
rows = [[1.0, 0.0], [0.0, 1.0]]
terminal = true
"""

ENCODE = """
[scenario]
kind = "encode-opt"
seed = 0

[model]
labels = 2

[model.base]
rows = [[0.9, 0.1, 0.0], [0.2, 0.3, 0.5]]

[encode]
objective = "log"
"""

TAX = """
[scenario]
kind = "tax"
seed = 0

[model]
labels = 2

[tax]
rule = "log"

[tax.channel]
rows = [[1.0], [1.0]]
"""

CHAIN = """
[scenario]
kind = "chain"
seed = 0

[model]
labels = 4

[[chain.hops]]
fidelity = 0.9

[[chain.hops]]
fidelity = 0.9
"""

BLACKWELL_DOMINATED = """
[scenario]
kind = "blackwell"
seed = 0

[model]
labels = 2

[blackwell.source]
rows = [[0.8, 0.2], [0.3, 0.7]]

[blackwell.target]
rows = [[0.9, 0.1], [0.1, 0.9]]
"""

BLACKWELL_INCOMPARABLE = """
[scenario]
kind = "blackwell"
seed = 0

[model]
labels = 2

[blackwell.source]
rows = [[0.9, 0.1], [0.4, 0.6]]

[blackwell.target]
rows = [[0.7, 0.3], [0.1, 0.9]]
"""

SAMPLES = {
    "relay-depth": RELAY,
    "interface": INTERFACE,
    "distortion-scatter": SCATTER,
    "signal-expansion": EXPANSION,
    "review-frontier": REVIEW,
    "custom-network": NETWORK,
    "encode-opt": ENCODE,
    "tax": TAX,
    "chain": CHAIN,
    "blackwell": BLACKWELL_DOMINATED,
}


class TestParsing:
    def test_every_kind_parses(self):
        for kind, text in SAMPLES.items():
            cfg = parse_config(text)
            assert cfg.kind == kind

    def test_kind_enum(self):
        assert set(SAMPLES) == set(ALL_KINDS)
        assert set(RUN_KINDS) < set(ALL_KINDS)
        with pytest.raises(ConfigError):
            parse_config(RELAY.replace("relay-depth", "mystery"))

    def test_unknown_key_reports_line(self):
        text = RELAY.replace("seed = 0", "seed = 0\ntypo_key = 3")
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert "typo_key" in str(err.value)
        assert err.value.line == text.splitlines().index("typo_key = 3") + 1

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(RELAY + "\n[extra]\nx = 1\n")

    def test_seed_required_and_nonnegative(self):
        with pytest.raises(ConfigError):
            parse_config(RELAY.replace("seed = 0\n", ""))
        with pytest.raises(ConfigError):
            parse_config(RELAY.replace("seed = 0", "seed = -1"))
        with pytest.raises(ConfigError):
            parse_config(RELAY.replace("seed = 0", 'seed = "zero"'))

    def test_invalid_toml_syntax(self):
        with pytest.raises(ConfigError):
            parse_config("[scenario\nkind = ")

    def test_channel_needs_exactly_one_spec(self):
        with pytest.raises(ConfigError):
            parse_config(RELAY.replace("fidelity = 0.9",
                                       "fidelity = 0.9\nrows = [[1.0]]"))
        with pytest.raises(ConfigError):
            parse_config(RELAY.replace("fidelity = 0.9", ""))

    def test_depths_positive(self):
        with pytest.raises(ConfigError):
            parse_config(RELAY.replace("[1, 2, 3, 5]", "[0, 1]"))
        with pytest.raises(ConfigError):
            parse_config(RELAY.replace("[1, 2, 3, 5]", "[]"))

    def test_prior_length_checked(self):
        with pytest.raises(ConfigError):
            parse_config(INTERFACE.replace(
                "prior = [0.3, 0.3, 0.2, 0.1, 0.06, 0.04]",
                "prior = [0.5, 0.5]"))

    def test_scatter_refuses_thin_statistics(self):
        with pytest.raises(ConfigError) as err:
            parse_config(SCATTER.replace("instances = 8", "instances = 2"))
        assert "correlation" in str(err.value)

    def test_scatter_forbids_model_section(self):
        with pytest.raises(ConfigError):
            parse_config(SCATTER + "\n[model]\nlabels = 3\n")

    def test_expansion_names_unique(self):
        with pytest.raises(ConfigError):
            parse_config(EXPANSION.replace('name = "fresh-look"',
                                           'name = "redundant-copy"'))

    def test_expansion_inputs_enum(self):
        with pytest.raises(ConfigError):
            parse_config(EXPANSION.replace('inputs = "ym"', 'inputs = "w"'))

    def test_review_costs_nonnegative(self):
        with pytest.raises(ConfigError):
            parse_config(REVIEW.replace("[0.0, 0.05, 0.1, 0.2, 1.0]",
                                        "[0.1, -0.5]"))

    def test_network_needs_one_terminal(self):
        with pytest.raises(ConfigError):
            parse_config(NETWORK.replace("terminal = true", ""))
        doubled = NETWORK.replace('id = "relay"',
                                  'id = "relay"\nterminal = true')
        with pytest.raises(ConfigError):
            parse_config(doubled)

    def test_encode_objective_excludes_loss_table(self):
        text = ENCODE + "\n[encode.loss]\nkind = \"zero-one\"\n"
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_variable_needs_dist_or_rows(self):
        broken = NETWORK.replace('parents = ["y"]\nrows = [[0.9, 0.1], [0.2, 0.8]]',
                                 'parents = ["y"]')
        with pytest.raises(ConfigError):
            parse_config(broken)


class TestRoundTrip:
    def test_parse_serialize_parse_is_identity(self):
        for text in SAMPLES.values():
            cfg = parse_config(text)
            again = parse_config(serialize_config(cfg))
            assert again == cfg

    def test_serialization_is_a_fixpoint(self):
        for text in SAMPLES.values():
            once = serialize_config(parse_config(text))
            assert serialize_config(parse_config(once)) == once

    def test_with_seed_replaces_only_seed(self):
        cfg = parse_config(RELAY)
        other = cfg.with_seed(9)
        assert other.seed == 9 and cfg.seed == 0
        assert other.data["relay"] == cfg.data["relay"]


class TestResultTable:
    def test_render_and_bits(self):
        table = ResultTable(("name", "nats"), (("a", math.log(2.0)),),
                            nat_columns=("nats",))
        nats = table.render()
        bits = table.render(bits=True)
        assert nats.splitlines()[1] == "a,0.69314718056"
        assert bits.splitlines()[1] == "a,1"
        assert "# units=nats" in nats and "# units=bits" in bits

    def test_no_units_line_without_nat_columns(self):
        table = ResultTable(("x",), ((1.0,),))
        assert "units" not in table.render(bits=True)

    def test_rectangular_enforced(self):
        from delnet.prob import InputError
        with pytest.raises(InputError):
            ResultTable(("a", "b"), ((1.0,),))
        with pytest.raises(InputError):
            ResultTable(("a",), ((1.0,),), nat_columns=("ghost",))

    def test_formatting(self):
        table = ResultTable(("a", "b", "c", "d"),
                            ((True, 3, 0.1, "txt"), (False, -1, -0.0, "y")))
        lines = table.render().splitlines()
        assert lines[1] == "true,3,0.1,txt"
        assert lines[2] == "false,-1,0,y"

    def test_pearson(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
        assert pearson([1, 2, 3], [5, 5, 5]) is None
        assert pearson([1, 2, 4], [3, 1, 0]) < 0


class TestRelayDepth:
    def test_exact_chain_values(self):
        table = run_config(parse_config(RELAY))
        accuracy = {d: a for d, a, _ in table.rows}
        two_hop = 0.9 ** 2 + 3 * (0.1 / 3) ** 2
        assert accuracy[1] == pytest.approx(1.0, abs=0)
        assert accuracy[2] == pytest.approx(0.9, abs=1e-12)
        assert accuracy[3] == pytest.approx(two_hop, abs=1e-12)
        acc = [a for _, a, _ in table.rows]
        assert all(acc[i] > acc[i + 1] for i in range(len(acc) - 1))
        for _, a, gap in table.rows:
            assert gap == pytest.approx(1.0 - a, abs=1e-12)

    def test_constant_hop_floors_at_prior_guess(self):
        text = RELAY.replace("fidelity = 0.9",
                             "rows = [[0.25, 0.25, 0.25, 0.25], [0.25, 0.25, 0.25, 0.25], [0.25, 0.25, 0.25, 0.25], [0.25, 0.25, 0.25, 0.25]]")
        table = run_config(parse_config(text))
        accuracy = {d: a for d, a, _ in table.rows}
        assert accuracy[1] == pytest.approx(1.0, abs=0)
        assert accuracy[2] == pytest.approx(0.25, abs=1e-12)
        assert accuracy[5] == pytest.approx(0.25, abs=1e-12)


class TestInterface:
    def test_structured_stays_above_prose(self):
        table = run_config(parse_config(INTERFACE))
        assert [r[0] for r in table.rows] == [0, 1, 2, 3]
        stage0 = table.rows[0]
        assert stage0[1] == stage0[2] == pytest.approx(1.0, abs=0)
        prose2 = 0.85 ** 2 + 5 * (0.15 / 5) ** 2
        assert table.rows[1][1] == pytest.approx(0.9, abs=1e-12)
        assert table.rows[2][1] == pytest.approx(0.9, abs=1e-12)
        assert table.rows[1][2] == pytest.approx(0.85, abs=1e-12)
        assert table.rows[2][2] == pytest.approx(prose2, abs=1e-12)
        for _, structured, prose in table.rows:
            assert structured >= prose - 1e-12
        assert table.rows[3][1] > table.rows[3][2] + 0.2

    def test_identity_budget_keeps_column_flat(self):
        text = INTERFACE.replace("budget = 4", "budget = 6")
        table = run_config(parse_config(text))
        for _, structured, _ in table.rows:
            assert structured == pytest.approx(1.0, abs=1e-12)


class TestScatter:
    def test_rows_and_positive_correlation(self):
        table = run_config(parse_config(SCATTER))
        assert len(table.rows) == 8
        for i, kl, drop in table.rows:
            assert kl >= -1e-12
            assert drop >= -1e-9
        footer = dict(table.footer)
        assert float(footer["pearson_r"]) > 0
        r = pearson([row[1] for row in table.rows],
                    [row[2] for row in table.rows])
        assert float(footer["pearson_r"]) == pytest.approx(r, abs=1e-10)

    def test_seed_changes_draws(self):
        base = run_config(parse_config(SCATTER))
        other = run_config(parse_config(SCATTER).with_seed(8))
        assert base.rows != other.rows

    def test_identity_relay_flags_undefined_correlation(self):
        text = SCATTER.replace("fidelity = 0.9", "fidelity = 1.0")
        text = text.replace("hops = 2", "hops = 1")
        table = run_config(parse_config(text))
        for _, kl, drop in table.rows:
            assert kl == pytest.approx(0.0, abs=1e-12)
            assert drop == pytest.approx(0.0, abs=1e-12)
        assert dict(table.footer)["pearson_r"] == "undefined"


class TestExpansion:
    def test_redundant_and_fresh_settings(self):
        table = run_config(parse_config(EXPANSION))
        rows = {r[0]: r for r in table.rows}
        name, without, with_w, gain, redundant = rows["redundant-copy"]
        assert without == pytest.approx(0.5, abs=1e-12)
        assert abs(gain) <= 1e-9 and redundant
        name, without, with_w, gain, redundant = rows["fresh-look"]
        assert with_w == pytest.approx(0.8, abs=1e-12)
        assert gain == pytest.approx(0.3, abs=1e-12)
        assert not redundant

    def test_explicit_ym_rows_match_fidelity_shorthand(self):
        # Label-major (y, m) pairs; the pooled message has one symbol.
        rows = "rows = [[0.8, 0.2], [0.2, 0.8]]"
        text = EXPANSION.replace('inputs = "ym"\nfidelity = 0.8',
                                 f'inputs = "ym"\n{rows}')
        explicit = run_config(parse_config(text))
        shorthand = run_config(parse_config(EXPANSION))
        assert explicit.rows[1][1:4] == pytest.approx(shorthand.rows[1][1:4],
                                                      abs=1e-12)
        assert explicit.rows[1][4] == shorthand.rows[1][4]


class TestReviewFrontier:
    def test_frontier_values(self):
        table = run_config(parse_config(REVIEW))
        expect = {0.0: (1.0, 0.0), 0.05: (1.0, 0.05), 0.1: (1.0, 0.1),
                  0.2: (0.0, 0.2), 1.0: (0.0, 0.2)}
        for cost, mass, value in table.rows:
            want_mass, want_value = expect[cost]
            assert mass == pytest.approx(want_mass, abs=0)
            assert value == pytest.approx(want_value, abs=1e-15)


class TestCustomNetwork:
    def test_declared_terminal_is_respected(self):
        table = run_config(parse_config(NETWORK))
        (loss, central, gap), = table.rows
        # Composed signal chain: P(correct) = 0.5(0.74 + 0.68).
        assert loss == pytest.approx(0.29, abs=1e-12)
        assert central == pytest.approx(0.15, abs=1e-12)
        assert gap == pytest.approx(0.14, abs=1e-12)

    def test_edges_optional(self):
        text = NETWORK.replace('edges = [["relay", "decide"]]\n', "")
        table = run_config(parse_config(text))
        assert table.rows[0][0] == pytest.approx(0.29, abs=1e-12)

    def test_unknown_input_is_config_error(self):
        text = NETWORK.replace('inputs = ["b"]', 'inputs = ["ghost"]')
        with pytest.raises(ConfigError):
            run_config(parse_config(text))

    def test_nonstochastic_rows_are_config_errors(self):
        text = NETWORK.replace("rows = [[0.8, 0.2], [0.2, 0.8]]",
                               "rows = [[0.8, 0.1], [0.2, 0.8]]")
        with pytest.raises(ConfigError):
            run_config(parse_config(text))


class TestEncodeOpt:
    def test_budget_sweep(self):
        table = run_config(parse_config(ENCODE))
        assert [r[0] for r in table.rows] == [1, 2, 3]
        assert table.rows[0][1] == pytest.approx(math.log(2.0), abs=1e-12)
        assert table.rows[0][2] == "0-0-0"
        values = [r[1] for r in table.rows]
        assert values[0] >= values[1] >= values[2]
        assert dict(table.footer)["exact"] == "true"

    def test_explicit_budgets_and_zero_one(self):
        text = ENCODE.replace('objective = "log"', "budgets = [2]")
        table = run_config(parse_config(text))
        assert len(table.rows) == 1 and table.rows[0][0] == 2
        assert table.nat_columns == ()


class TestTax:
    def test_pooling_tax_is_full_information(self):
        table = run_config(parse_config(TAX))
        row = table.rows[0]
        assert row[0] == "log"
        assert row[1] == pytest.approx(0.0, abs=1e-12)
        for cell in row[2:]:
            assert cell == pytest.approx(math.log(2.0), abs=1e-12)

    def test_brier_drops_mi_column(self):
        table = run_config(parse_config(TAX.replace('rule = "log"',
                                                    'rule = "brier"')))
        assert "conditional_mi" not in table.columns
        assert table.nat_columns == ()
        assert table.rows[0][3] == pytest.approx(table.rows[0][2] - table.rows[0][1],
                                                 abs=1e-12)


class TestChain:
    def test_terms_accumulate(self):
        table = run_config(parse_config(CHAIN))
        running = 0.0
        for stage, term, cumulative in table.rows:
            running += term
            assert cumulative == pytest.approx(running, abs=0)
        assert [r[0] for r in table.rows] == [1, 2]
        assert table.rows[0][1] > table.rows[1][1]


class TestBlackwell:
    def test_witness_matrix_reconstructs_source(self):
        table = run_config(parse_config(BLACKWELL_DOMINATED))
        assert dict(table.footer)["dominated"] == "true"
        g = np.array([row[1:] for row in table.rows], dtype=float)
        kt = np.array([[0.9, 0.1], [0.1, 0.9]])
        ks = np.array([[0.8, 0.2], [0.3, 0.7]])
        assert np.allclose(kt @ g, ks, atol=1e-9)

    def test_separating_loss_emitted_for_incomparable_pair(self):
        table = run_config(parse_config(BLACKWELL_INCOMPARABLE))
        footer = dict(table.footer)
        assert footer["dominated"] == "false"
        assert float(footer["margin"]) >= 1e-7
        loss = np.array([row[1:] for row in table.rows], dtype=float)
        assert loss.min() >= 0.0


class TestDeterminism:
    @pytest.mark.parametrize("kind", sorted(SAMPLES))
    def test_same_seed_same_bytes(self, kind):
        text = SAMPLES[kind]
        first = run_config(parse_config(text)).render()
        second = run_config(parse_config(text)).render()
        assert first == second

    def test_footer_tracks_effective_seed(self):
        cfg = parse_config(SCATTER).with_seed(11)
        footer = dict(run_config(cfg).footer)
        assert footer["seed"] == "11"
        base_footer = dict(run_config(parse_config(SCATTER)).footer)
        assert footer["config_sha256"] != base_footer["config_sha256"]
