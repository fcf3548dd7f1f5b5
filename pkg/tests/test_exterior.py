import pytest

from bklbounce.exterior import (
    DEFAULT_CONVENTION,
    ConventionError,
    SignConvention,
    enumerate_conventions,
    mask_of,
    sigma_commutator,
    sigma_on_monomial,
    slot_parities,
    wedge,
)


def test_wedge_signs():
    assert wedge(mask_of((0,)), mask_of((1,))) == (1, mask_of((0, 1)))
    assert wedge(mask_of((1,)), mask_of((0,))) == (-1, mask_of((0, 1)))
    assert wedge(mask_of((2,)), mask_of((2,))) == (0, 0)
    assert wedge(mask_of((0, 2)), mask_of((1, 3))) == (-1, 0b1111)


def test_wedge_associative_signs():
    for m1 in range(16):
        for m2 in range(16):
            s12, m12 = wedge(m1, m2)
            for m3 in range(16):
                s23, m23 = wedge(m2, m3)
                l1, lm1 = wedge(m12, m3) if s12 else (0, 0)
                r1, rm1 = wedge(m1, m23) if s23 else (0, 0)
                assert s12 * l1 == s23 * r1
                if s12 * l1:
                    assert lm1 == rm1


def test_sigma_action_default_convention():
    conv = DEFAULT_CONVENTION
    assert sigma_on_monomial(conv, "s1", mask_of((0,))) == ((1, mask_of((1,))),)
    assert sigma_on_monomial(conv, "s1", mask_of((1,))) == ((1, mask_of((0,))),)
    assert sigma_on_monomial(conv, "s23", mask_of((2,))) == ((-1, mask_of((3,))),)
    assert sigma_on_monomial(conv, "s23", mask_of((3,))) == ((1, mask_of((2,))),)
    # derivation extension kills the volume monomial for boosts and rotations
    assert sigma_on_monomial(conv, "s1", 0b1111) == ()
    assert sigma_on_monomial(conv, "s23", 0b1111) == ()
    assert sigma_on_monomial(conv, "s0", 0b1111) == ((4, 0b1111),)


def test_commutators_close_and_match():
    conv = DEFAULT_CONVENTION
    assert sigma_commutator(conv, "s23", "s31") == ((-1, "s12"),)
    assert sigma_commutator(conv, "s1", "s2") == ((1, "s12"),)
    assert sigma_commutator(conv, "s0", "s1") == ()


def test_commutator_closure_fails_for_mixed_ratio():
    conv = SignConvention(eps=(1, 1, 1), eps_prime=(-1, 1, 1), eta=(-1, -1, -1))
    with pytest.raises(ConventionError):
        sigma_commutator(conv, "s1", "s2")


def test_parities():
    # A+ = theta_2 s3 + theta_3 s2 is even for the first decomposition
    assert slot_parities(mask_of((2,)), "s3")[0] == 0
    assert slot_parities(mask_of((3,)), "s2")[0] == 0
    # and odd for the second
    assert slot_parities(mask_of((2,)), "s3")[1] == 1


def test_enumeration_count():
    assert sum(1 for _ in enumerate_conventions()) == 512
