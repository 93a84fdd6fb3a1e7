from etea.stego.carrier import embed, extract, has_payload  # noqa: F401
