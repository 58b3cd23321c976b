"""
Tomlinson-Harashima precoding simulator with quantized channel feedback

library package: channel and quantizer models, the TH and ZF precoders,
closed-form analysis, and the monte carlo harness behind the commands
"""
