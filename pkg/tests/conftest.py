import negative_control

negative_control.register()
