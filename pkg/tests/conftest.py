import os

from hypothesis import HealthCheck, settings

from perspectra.literals import parse_group

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


class Lit:
    """Group written in user factor order, with user-order helpers."""

    def __init__(self, text):
        self.gl = parse_group(text)
        self.G = self.gl.group

    def el(self, *coords):
        return self.G.element(self.gl.to_canonical(coords))

    def sub(self, *gens):
        return self.G.subgroup([self.gl.to_canonical(g) for g in gens])

    def show(self, S):
        return self.gl.subgroup_literal(S)
