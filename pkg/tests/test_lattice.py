import numpy as np
import pytest

from latticebank import (
    EngineConfig,
    IllConditionedError,
    LatticeEngine,
    SerializedFilterBank,
    band_desired_row,
    block_data_matrix,
    interleave,
    project_residual_qr,
    synthesize_serialized,
)

from helpers import brute_band_residual


def run_streams(config, z, d):
    engine = LatticeEngine(config)
    return engine, engine.process(z, d)


class TestConfig:
    def test_rejects_order_not_multiple_of_channels(self):
        with pytest.raises(ValueError):
            EngineConfig(channels=2, order=3)

    def test_rejects_bad_forgetting(self):
        with pytest.raises(ValueError):
            EngineConfig(channels=1, order=1, forgetting=0.0)
        with pytest.raises(ValueError):
            EngineConfig(channels=1, order=1, forgetting=1.5)

    def test_rejects_negative_epsilon(self):
        with pytest.raises(ValueError):
            EngineConfig(channels=1, order=1, epsilon=-1.0)


class TestInit:
    def test_zero_blocks_give_zero_outputs(self):
        engine = LatticeEngine(EngineConfig(channels=2, order=4))
        for _ in range(3):
            e = engine.step([0.0, 0.0], [0.0, 0.0])
            assert not e.any()
        snap = engine.snapshot()
        assert not snap.delta_eb.any()
        for dab, ra, rb in snap.history:
            assert not dab.any() and not ra.any() and not rb.any()

    def test_likelihood_is_one_after_init(self):
        engine = LatticeEngine(EngineConfig(channels=3, order=3))
        assert np.array_equal(engine.snapshot().delta, np.ones((3, 4)))

    def test_same_config_same_state(self):
        a = LatticeEngine(EngineConfig(channels=2, order=2))
        b = LatticeEngine(EngineConfig(channels=2, order=2))
        assert a.dump_state() == b.dump_state()


class TestStepExamples:
    def test_single_channel_matches_oracle(self):
        # M=1: band 0 regresses d on the stream window including the
        # current sample, so the oracle matrix is anchored at each time
        rng = np.random.default_rng(0)
        z = rng.standard_normal(10)
        d = rng.standard_normal(10)
        engine, res = run_streams(EngineConfig(channels=1, order=2), z, d)
        for k in range(10):
            for p in range(1, 3):
                ref = brute_band_residual(z, d, 1, 0, p, k)
                assert res[k, 0, p] == pytest.approx(ref, rel=1e-8, abs=1e-10)

    def test_self_generated_residual_collapses(self):
        rng = np.random.default_rng(1)
        g = SerializedFilterBank(rng.standard_normal((2, 4)))
        w = rng.standard_normal((200, 2))
        z = interleave(w)
        d = synthesize_serialized(g, z)
        engine, res = run_streams(EngineConfig(channels=2, order=4), z, d)
        assert np.abs(res[-1, :, 4]).max() < 1e-6

    def test_full_oracle_sweep_small(self):
        rng = np.random.default_rng(2)
        m, n, blocks = 2, 4, 12
        z = rng.standard_normal(m * blocks)
        d = rng.standard_normal(m * blocks)
        engine, res = run_streams(EngineConfig(channels=m, order=n), z, d)
        for k in range(blocks):
            for p in range(1, n + 1):
                for i in range(m):
                    ref = brute_band_residual(z, d, m, i, p, k)
                    assert res[k, i, p] == pytest.approx(ref, rel=1e-8, abs=1e-10)

    def test_block_length_checked(self):
        engine = LatticeEngine(EngineConfig(channels=2, order=2))
        with pytest.raises(ValueError):
            engine.step([1.0], [1.0, 2.0])


class TestResidualsAccessor:
    def test_order_zero_returns_desired_block(self):
        engine = LatticeEngine(EngineConfig(channels=2, order=2))
        engine.step([1.0, 2.0], [3.0, 4.0])
        assert engine.residuals(0).tolist() == [3.0, 4.0]

    def test_matches_step_return(self):
        rng = np.random.default_rng(3)
        engine = LatticeEngine(EngineConfig(channels=2, order=4))
        for _ in range(5):
            e = engine.step(rng.standard_normal(2), rng.standard_normal(2))
        for p in range(5):
            assert np.array_equal(engine.residuals(p), e[:, p])

    def test_out_of_range(self):
        engine = LatticeEngine(EngineConfig(channels=1, order=1))
        engine.step([1.0], [1.0])
        with pytest.raises(IndexError):
            engine.residuals(2)

    def test_before_any_step(self):
        engine = LatticeEngine(EngineConfig(channels=1, order=1))
        with pytest.raises(RuntimeError):
            engine.residuals(0)


class TestSnapshot:
    def test_snapshot_unaffected_by_later_steps(self):
        rng = np.random.default_rng(4)
        engine = LatticeEngine(EngineConfig(channels=2, order=2))
        for _ in range(4):
            engine.step(rng.standard_normal(2), rng.standard_normal(2))
        snap = engine.snapshot()
        frozen = snap.residuals.copy()
        engine.step([9.0, 9.0], [9.0, 9.0])
        assert np.array_equal(snap.residuals, frozen)

    def test_fresh_snapshot_matches_init(self):
        snap = LatticeEngine(EngineConfig(channels=2, order=4)).snapshot()
        assert snap.blocks == 0
        assert not snap.alpha.any()
        assert np.array_equal(snap.delta, np.ones((2, 5)))

    def test_arrays_read_only(self):
        snap = LatticeEngine(EngineConfig(channels=1, order=1)).snapshot()
        with pytest.raises(ValueError):
            snap.alpha[0, 0] = 1.0


class TestInvariants:
    def test_oracle_equivalence_random_sweep(self):
        rng = np.random.default_rng(5)
        for m in (1, 2, 3):
            for n in (m, 2 * m):
                blocks = 16
                z = rng.standard_normal(m * blocks)
                d = rng.standard_normal(m * blocks)
                engine, res = run_streams(EngineConfig(channels=m, order=n), z, d)
                for k in range(blocks):
                    mats = {p: block_data_matrix(z, m, p, k) for p in range(1, n + 1)}
                    for i in range(m):
                        row = band_desired_row(d, m, i, k)
                        for p in range(1, n + 1):
                            ref = project_residual_qr(row, mats[p])
                            assert res[k, i, p] == pytest.approx(ref, rel=1e-8, abs=1e-10)

    def test_likelihood_in_unit_interval(self):
        rng = np.random.default_rng(6)
        engine = LatticeEngine(EngineConfig(channels=2, order=4))
        for _ in range(30):
            engine.step(rng.standard_normal(2), rng.standard_normal(2))
            delta = np.array(engine.delta)
            assert (delta > 0).all() and (delta <= 1.0).all()

    def test_residual_energy_monotone_in_order(self):
        rng = np.random.default_rng(7)
        engine = LatticeEngine(EngineConfig(channels=2, order=6))
        for _ in range(40):
            engine.step(rng.standard_normal(2), rng.standard_normal(2))
            for i in range(2):
                energies = [engine.residual_energy(p)[i] for p in range(7)]
                assert all(b <= a + 1e-9 for a, b in zip(energies, energies[1:]))

    def test_operation_counts_near_claimed_rates(self):
        # per block: ~18*M*N multiplies (divisions included) and ~9*M*N adds
        for m, n in [(1, 2), (2, 4), (3, 6), (2, 8)]:
            engine = LatticeEngine(EngineConfig(channels=m, order=n))
            rng = np.random.default_rng(8)
            blocks = 10
            for _ in range(blocks):
                engine.step(rng.standard_normal(m), rng.standard_normal(m))
            mult_rate = engine.mult_count / blocks
            add_rate = engine.add_count / blocks
            assert 18 * m * n / 2 <= mult_rate <= 18 * m * n * 2
            assert 9 * m * n / 2 <= add_rate <= 9 * m * n * 2

    def test_determinism_bit_identical(self):
        rng = np.random.default_rng(9)
        z = rng.standard_normal(20)
        d = rng.standard_normal(20)
        a, _ = run_streams(EngineConfig(channels=2, order=4), z, d)
        b, _ = run_streams(EngineConfig(channels=2, order=4), z, d)
        assert a.dump_state() == b.dump_state()


class TestForgetting:
    def test_matches_weighted_brute_force(self):
        lam = 0.9
        rng = np.random.default_rng(10)
        for m in (1, 2, 3):
            n, blocks = 2 * m, 14
            z = rng.standard_normal(m * blocks)
            d = rng.standard_normal(m * blocks)
            cfg = EngineConfig(channels=m, order=n, forgetting=lam)
            engine, res = run_streams(cfg, z, d)
            k = blocks - 1
            for i in range(m):
                for p in range(n + 1):
                    ref = brute_band_residual(z, d, m, i, p, k, forgetting=lam)
                    assert res[k, i, p] == pytest.approx(ref, rel=1e-8, abs=1e-10)


class TestDiagnostics:
    def test_zero_epsilon_reports_ill_conditioned(self):
        engine = LatticeEngine(EngineConfig(channels=2, order=4, epsilon=0.0))
        rng = np.random.default_rng(11)
        with pytest.raises(IllConditionedError):
            for _ in range(8):
                engine.step(rng.standard_normal(2), rng.standard_normal(2))


class TestStateDump:
    def test_format_and_ordering(self):
        engine = LatticeEngine(EngineConfig(channels=2, order=2))
        engine.step([1.0, 2.0], [3.0, 4.0])
        lines = engine.dump_state().strip().splitlines()
        assert lines == sorted(lines)
        for line in lines:
            key, value = line.split("=")
            float(value)  # parses
            assert "[" in key and key.endswith("]")
        assert any(line.startswith("delta[0][0]=") for line in lines)
