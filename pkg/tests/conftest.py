from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def at(graph, *label):
    """Vertex of a Pascal or Young graph by label; the level is the label sum."""
    return graph.index_of(sum(label), tuple(label))

