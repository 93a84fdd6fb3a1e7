from etea.net.frame import ACK, NAK, TransferFrame  # noqa: F401
from etea.net.transfer import TransferServer, send_file, serve  # noqa: F401
