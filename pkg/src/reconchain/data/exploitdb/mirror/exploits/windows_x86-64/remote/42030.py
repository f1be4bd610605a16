#!/usr/bin/env python
# Exploit Title: Microsoft Windows 8/8.1/2012 R2 (x64) - 'EternalBlue' SMB Remote Code Execution (MS17-010)
# EDB-ID: 42030
# Offline fixture. Placeholder body: the original proof-of-concept code is not included.

print('placeholder')
