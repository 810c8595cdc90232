from . import hypercube_core, fw_polynomials, ortho_graph, bound_engine, certificates, report_gen

__all__ = ["hypercube_core", "fw_polynomials", "ortho_graph", "bound_engine", "certificates", "report_gen"]
