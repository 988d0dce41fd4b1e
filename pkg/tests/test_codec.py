import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphafit.apfp import UnitReal, from_decimal_fraction, to_binary_string, to_decimal_string
from alphafit.codec import (
    DYADIC,
    LOGISTIC,
    Alpha,
    alpha_from_parameter,
    decode,
    decode_all,
    decode_dyadic,
    decode_logistic,
    encode,
    format_alpha,
    parse_alpha,
    read_alpha,
    scheme_bound,
    write_alpha,
)
from alphafit.conjugacy import phi
from alphafit.errors import CapacityError, DomainError, ParseError, PrecisionExhaustedError

from conftest import REFERENCE_BITS, CONJUGATE_BITS, CONJUGATE_DECIMAL, Z0_DECIMAL

samples = st.lists(st.floats(0, 1), min_size=1, max_size=40)


def test_bounds():
    assert scheme_bound(DYADIC, 8) == 2**-8
    assert scheme_bound(LOGISTIC, 8) == math.pi * 2**-7
    with pytest.raises(DomainError):
        scheme_bound("fourier", 8)


class TestDyadic:
    def test_single_half(self):
        a = encode([0.5], 8)
        assert a.word.bits[:8] == "10000000"
        assert decode(a, 0).value == 0.5

    def test_layout_is_payload_then_zeros(self):
        a = encode([0.25, 0.75], 4, guard=8)
        assert a.word.bits == "0100" "1100" "0000" "00000000"

    @given(samples, st.sampled_from([1, 4, 8, 16]))
    def test_round_trip_bound(self, xs, tau):
        a = encode(xs, tau)
        for k, x in enumerate(xs):
            err = abs(decode(a, k).value - x)
            assert err <= 2**-tau
            if x < 1:
                assert err < 2**-tau

    @given(samples)
    def test_decode_matches_rational_shift(self, xs):
        a = encode(xs, 8)
        for k in range(len(xs)):
            exact = (a.word.value * 2 ** (8 * k)) % 1
            assert decode(a, k).value == float(exact)

    def test_reference_bits(self, reference):
        a = encode(reference, 8)
        assert a.word.bits[:400] == REFERENCE_BITS
        assert set(a.word.bits[400:]) == {"0"}

    def test_prefix_consistency(self, reference):
        # encoding the first m samples is a bit prefix of encoding all of them
        full = encode(reference, 8).word.bits
        for m in (1, 7, 30):
            assert full.startswith(encode(reference[:m], 8).word.bits[: 8 * m])

    def test_guard_extrapolation_flag(self):
        a = encode([0.1, 0.2], 8, guard=16)
        assert decode(a, 2).extrapolated and not decode(a, 1).extrapolated
        assert decode(a, 3).value == 0.0
        with pytest.raises(PrecisionExhaustedError) as exc:
            decode(a, 4)
        assert exc.value.max_valid == 3

    def test_errors(self):
        with pytest.raises(DomainError):
            encode([], 8)
        with pytest.raises(DomainError):
            encode([1.5], 8)
        with pytest.raises(DomainError):
            encode([0.5], 0)
        with pytest.raises(CapacityError):
            encode([0.5] * 100, 8, max_bits=256)
        with pytest.raises(DomainError):
            decode(encode([0.5], 8), -1)
        with pytest.raises(DomainError):
            decode_logistic(encode([0.5], 8), 0)


class TestLogistic:
    def test_one_maps_to_quarter(self):
        a = encode([1.0], 8, LOGISTIC)
        assert a.word.bits[:8] == "01000000"
        assert a.z0 == UnitReal.ones(a.precision)

    def test_every_tau_th_bit_is_zero(self, reference):
        bits = encode(reference, 8, LOGISTIC).word.bits
        assert all(bits[i] == "0" for i in range(0, 400, 8))

    @settings(max_examples=40, deadline=None)
    @given(samples, st.sampled_from([4, 8, 12]))
    def test_round_trip_bound(self, xs, tau):
        a = encode(xs, tau, LOGISTIC)
        for k, x in enumerate(xs):
            assert abs(decode(a, k).value - x) < math.pi * 2 ** (1 - tau)

    def test_against_mpmath_decoder(self, reference):
        # the closed-form sampler sin^2(2^(k tau) asin(sqrt(z0))) as oracle
        a = encode(reference, 8, LOGISTIC)
        with mpmath.workprec(a.precision + 64):
            z0 = mpmath.mpf(a.z0.mantissa) / mpmath.mpf(2) ** a.precision
            theta = mpmath.asin(mpmath.sqrt(z0))
            for k in range(a.n):
                ref = float(mpmath.sin(mpmath.mpf(2) ** (8 * k) * theta) ** 2)
                assert abs(decode(a, k).value - ref) < 1e-9

    def test_paths_agree(self, reference):
        a = encode(reference, 8, LOGISTIC)
        for k in range(a.n):
            c = decode_logistic(a, k, "conjugate").value
            d = decode_logistic(a, k, "direct").value
            assert abs(c - d) < 1e-9

    def test_reference_goldens(self, reference):
        a = encode(reference, 8, LOGISTIC)
        assert a.word.bits[:400] == CONJUGATE_BITS
        assert to_decimal_string(a.word, 17) == CONJUGATE_DECIMAL[:19]
        assert to_decimal_string(a.z0, 17) == Z0_DECIMAL[:19]

    def test_z0_matches_oracle_phi(self, reference):
        a = encode(reference, 8, LOGISTIC)
        with mpmath.workprec(600):
            w = mpmath.mpf(a.word.mantissa) / mpmath.mpf(2) ** a.precision
            ref = mpmath.sin(2 * mpmath.pi * w) ** 2
            assert abs(mpmath.mpf(a.z0.mantissa) / mpmath.mpf(2) ** a.precision - ref) < mpmath.mpf(2) ** (
                -a.precision + 1
            )


class TestParameter:
    def test_bare_logistic_matches_word(self, reference):
        a = encode(reference, 8, LOGISTIC)
        bare = alpha_from_parameter(a.decimal(), LOGISTIC, 8, a.n)
        assert not bare.has_word
        for k in range(a.n):
            assert abs(decode(bare, k).value - decode(a, k).value) < 1e-9

    def test_bare_dyadic(self, reference):
        a = encode(reference, 8)
        bare = alpha_from_parameter(a.decimal(), DYADIC, 8, a.n)
        assert bare.word.bits[:400] == REFERENCE_BITS

    def test_zero_parameter(self):
        a = alpha_from_parameter("0." + "0" * 40, LOGISTIC, 8, 10)
        assert [s.value for s in decode_all(a, 10)] == [0.0] * 10

    def test_bad_parameter(self):
        with pytest.raises(ParseError):
            alpha_from_parameter("1.5", DYADIC, 8, 3)


class TestAlphaFile:
    @pytest.mark.parametrize("scheme", [DYADIC, LOGISTIC])
    def test_round_trip(self, reference, scheme, tmp_path):
        a = encode(reference, 8, scheme)
        a = Alpha(a.scheme, a.tau, a.n, a.word, a.z0, a.guard, {"norm_min": "0.0", "norm_max": "1.0"})
        path = tmp_path / "x.alpha"
        write_alpha(a, path)
        b = read_alpha(path)
        assert b == a and b.meta == a.meta
        assert format_alpha(b) == path.read_text()

    def test_guard_survives(self):
        a = encode([0.3, 0.6], 8, guard=5)
        b = parse_alpha(format_alpha(a))
        assert b.guard == 5 and b == a

    def test_format(self):
        text = format_alpha(encode([0.5], 8))
        assert text.splitlines()[:4] == ["scheme=dyadic", "tau=8", "n=1", "alpha_bits=1" + "0" * 47]

    @pytest.mark.parametrize(
        "text",
        [
            "scheme=dyadic\ntau=8\nn=1\n",
            "scheme=dyadic\ntau=8\nn=1\nalpha_bits=10\n",
            "scheme=dyadic\ntau=8\nn=1\nalpha_bits=1x" + "0" * 20 + "\n",
            "scheme=fourier\ntau=8\nn=1\nalpha_bits=" + "0" * 48 + "\n",
            "scheme=dyadic\ntau=eight\nn=1\nalpha_bits=" + "0" * 48 + "\n",
            "scheme=dyadic\ntau=8\nn=1\nalpha_bits=" + "0" * 48 + "\ncolor=red\n",
            "scheme=dyadic\ntau=8\nn=1\nn=1\nalpha_bits=" + "0" * 48 + "\n",
            "scheme=dyadic\ntau=8\nn=1\nalpha_bits=\n",
            "scheme=logistic\ntau=8\nn=1\nalpha_bits=" + "0" * 48 + "\n",
            "just some text\n",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(ParseError):
            parse_alpha(text)

    def test_bare_file(self):
        a = parse_alpha("scheme=logistic\ntau=8\nn=3\nalpha_bits=\nz0_decimal=0.0\n")
        assert [s.value for s in decode_all(a, 3)] == [0.0] * 3


def test_decode_all_count():
    with pytest.raises(DomainError):
        decode_all(encode([0.5], 8), 0)


def test_random_datasets_deterministic():
    rng = random.Random(4)
    xs = [rng.random() for _ in range(25)]
    assert format_alpha(encode(xs, 8, LOGISTIC)) == format_alpha(encode(xs, 8, LOGISTIC))
    assert to_binary_string(encode(xs, 8).word)[:8] == to_binary_string(from_decimal_fraction(xs[0], 8))
    assert phi(encode(xs, 8, LOGISTIC).word) == encode(xs, 8, LOGISTIC).z0


def test_degradation_over_sweep():
    # largest logistic error over the largest dyadic error, per tau, across a sweep
    rng = random.Random(2024)
    worst = {4: [0.0, 0.0], 8: [0.0, 0.0], 16: [0.0, 0.0]}
    for _ in range(100):
        xs = [rng.random() for _ in range(rng.randint(1, 200))]
        tau = rng.choice([4, 8, 16])
        for i, scheme in enumerate((DYADIC, LOGISTIC)):
            a = encode(xs, tau, scheme)
            err = max(abs(s.value - x) for s, x in zip(decode_all(a, len(xs)), xs))
            worst[tau][i] = max(worst[tau][i], err)
    for dy, lg in worst.values():
        assert lg / dy <= 2 * math.pi


def test_logistic_one_then_zero():
    # z0 = 1 (as all ones); the next sample sits at a multiple of pi
    a = encode([1.0, 0.0], 8, LOGISTIC)
    assert decode(a, 0).value > 1 - 1e-12
    assert decode(a, 1).value == 0.0
