package com.parkassist;

import android.app.Service;
import android.content.Intent;
import android.os.IBinder;
import androidx.localbroadcastmanager.content.LocalBroadcastManager;

public class ParkingAlertService extends Service {
    private static final String ACTION_ALERT = "com.parkassist.ALERT";
    private static final String PERMISSION_ALERT = "com.parkassist.permission.ALERT";

    @Override
    public IBinder onBind(Intent intent) {
        return null;
    }

    public void onObstacle(int distance) {
        Intent alert = new Intent(ACTION_ALERT);
        alert.putExtra("distance", distance);
        LocalBroadcastManager lbm = LocalBroadcastManager.getInstance(this);
        lbm.sendBroadcast(alert);
        sendBroadcast(alert, PERMISSION_ALERT);
        this.sendBroadcast(alert);
    }
}
